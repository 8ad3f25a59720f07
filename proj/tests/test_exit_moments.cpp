/*
   Copyright 2026 The conewalk Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <random>
#include <tuple>

#include <gtest/gtest.h>

#include "conewalk/exit_moments.hpp"

using namespace conewalk;

namespace {

using PR = Poly<Rational>;
using PB = Poly<BigFloat>;

template <class F>
MomentTable<F> random_table(int order, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(-9, 9);
    auto t = normalized_table<F>(order);
    for (int s = 3; s <= order; ++s)
        for (int k = 0; k <= s; ++k) t.set(k, s - k, from_rational<F>(Rational(u(rng), 4)));
    return t;
}

std::string error_kind(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return "";
}

BigFloat tol256() { return ldexp(BigFloat(1), -128); }

}  // namespace

TEST(FirstMoment, FormulaAndIdentity) {
    const auto cone = make_cone_from_b(Rational(3, 2));
    const PR G = first_moment_poly(cone);
    EXPECT_EQ(G, PR::monomial(1, 1, Rational(3, 2)) - PR::monomial(0, 2));
    for (unsigned seed = 1; seed <= 4; ++seed) EXPECT_EQ(apply_lx(G, random_table<Rational>(2, seed)).output, PR::constant(-1));
    const auto r = tau_moment_poly(1, make_cone<Rational>(4), random_table<Rational>(2, 1));
    EXPECT_EQ(r.G, PR::monomial(1, 1) - PR::monomial(0, 2));
    EXPECT_TRUE(r.residual.is_zero());
}

TEST(FirstMoment, RightAngleIsNotFinite) {
    EXPECT_EQ(error_kind([] { tau_moment_poly(1, make_cone<Rational>(2), normalized_table<Rational>(2)); }),
              "moment-not-finite");
    EXPECT_EQ(error_kind([] { first_moment_poly(make_cone<Rational>(2)); }), "moment-not-finite");
}

TEST(PoissonSolve, ConstantRightHandSide) {
    const auto cone = make_cone_from_b(Rational(2, 5));
    const auto F = poisson_solve(PR::constant(-1), cone, random_table<Rational>(2, 2), 2);
    EXPECT_EQ(F, PR::monomial(1, 1, Rational(2, 5)) - PR::monomial(0, 2));
}

TEST(PoissonSolve, ZeroRightHandSide) {
    EXPECT_TRUE(poisson_solve(PR(), make_cone<Rational>(4), random_table<Rational>(3, 3), 3).is_zero());
}

TEST(PoissonSolve, LinearRightHandSideAtFifthOfPi) {
    PrecisionScope scope(256);
    const auto cone = make_cone<BigFloat>(5);
    const auto mu = random_table<BigFloat>(3, 5);
    const PB F = poisson_solve(PB::x1(), cone, mu, 3);
    EXPECT_EQ(F.degree(), 3);
    const PB diff = apply_lx(F, mu).output - PB::x1();
    EXPECT_LE(max_abs_coeff(diff), tol256() * std::max(BigFloat(1), max_abs_coeff(F)));
    EXPECT_TRUE(vanishes_on_boundary(F, cone, max_abs_coeff(F)));
}

TEST(PoissonSolve, ExactOnQuadraticCone) {
    const auto cone = make_cone<Quadratic>(6);
    const auto mu = random_table<Quadratic>(5, 6);
    const Poly<Quadratic> f = Poly<Quadratic>::monomial(2, 1, Quadratic(3)) - Poly<Quadratic>::x2();
    const auto F = poisson_solve(f, cone, mu, 5);
    EXPECT_EQ(apply_lx(F, mu).output, f);
    EXPECT_TRUE(vanishes_on_boundary(F, cone));
    EXPECT_EQ(poisson_solve(f, cone, mu, 5, 99), F);
}

TEST(PoissonSolve, Errors) {
    const auto cone = make_cone<Rational>(4);
    EXPECT_EQ(error_kind([&] { poisson_solve(PR(), cone, random_table<Rational>(4, 1), 4); }), "degree-too-high");
    EXPECT_EQ(error_kind([&] { poisson_solve(PR(), cone, random_table<Rational>(2, 1), 3); }), "insufficient-moments");
}

TEST(TauMoments, SecondMomentAtFifthOfPi) {
    PrecisionScope scope(256);
    const auto cone = make_cone<BigFloat>(5);
    const auto mu = random_table<BigFloat>(4, 8);
    const auto r = tau_moment_poly(2, cone, mu);
    EXPECT_EQ(r.G.degree(), 4);
    EXPECT_LE(max_abs_coeff(r.residual), tol256() * r.scale);
    // g_2 = -1 - 2 (G_1 + L_X G_1) = 1 - 2 G_1
    const PB expected = PB::constant(1) - first_moment_poly(cone) * BigFloat(2);
    EXPECT_LE(max_abs_coeff(r.rhs - expected), tol256());
    EXPECT_EQ(error_kind([&] { tau_moment_poly(3, cone, random_table<BigFloat>(6, 1)); }), "moment-not-finite");
}

TEST(TauMoments, ExactDivisibility) {
    const auto cone = make_cone<Quadratic>(12);
    const auto mu = random_table<Quadratic>(10, 9);
    TauMomentSolver<Quadratic> solver(cone, mu);
    for (int k = 1; k <= 5; ++k) {
        const auto r = solver.solve(k);
        EXPECT_EQ(r.G.degree(), 2 * k);
        EXPECT_TRUE(r.residual.is_zero()) << k;
        const auto q = divide_by_linear(r.G, Quadratic(0), Quadratic(1));
        EXPECT_TRUE(q.remainder.is_zero()) << k;
        EXPECT_TRUE(divide_by_linear(q.quotient, *cone.b, Quadratic(-1)).remainder.is_zero()) << k;
    }
    EXPECT_EQ(error_kind([&] { solver.solve(6); }), "moment-not-finite");
}

TEST(TauMoments, ThresholdForGeneralAngle) {
    PrecisionScope scope(256);
    // alpha = 2 pi / 9 gives pi / alpha = 4.5: k = 2 is finite, k = 3 is not
    const auto cone = make_cone_from_alpha<BigFloat>(big_pi() * 2 / 9);
    EXPECT_NO_THROW(tau_moment_poly(2, cone, random_table<BigFloat>(4, 2)));
    EXPECT_EQ(error_kind([&] { tau_moment_poly(3, cone, random_table<BigFloat>(6, 2)); }), "moment-not-finite");
}

TEST(ExitPosition, Examples) {
    const auto cone = make_cone<Rational>(4);
    const auto ep = exit_position_moments(cone, Rational(3), Rational(1));
    EXPECT_EQ(ep.mean1, Rational(3));
    EXPECT_EQ(ep.mean2, Rational(1));
    EXPECT_EQ(*ep.second1, Rational(9 + 2));
    EXPECT_EQ(*ep.second2, Rational(1 + 2));
    // on the boundary ray x2 = x1 the moments reduce to squares
    const auto b = exit_position_moments(cone, Rational(2), Rational(2));
    EXPECT_EQ(*b.second1, Rational(4));
    const auto v = exit_position_moments(make_cone<Rational>(2), Rational(1), Rational(1), false);
    EXPECT_FALSE(v.second1.has_value());
    EXPECT_EQ(error_kind([] { exit_position_moments(make_cone<Rational>(2), Rational(1), Rational(1)); }),
              "angle-out-of-range");
}

TEST(ExitPosition, DiagonalWalkPullback) {
    const auto w = builtin_walk("diagonal");
    const auto T = build_transform<Quadratic>(w);
    const auto G = T.pull_back(first_moment_poly(T.cone));
    EXPECT_EQ(G, Poly<Quadratic>::monomial(1, 1, Quadratic(2)));
    const auto [x1, x2] = T.apply(1, 1);
    EXPECT_EQ(first_moment_poly(T.cone).evaluate(x1, x2), Quadratic(2));
}

TEST(ExitPosition, DiagonalWalkByPathEnumeration) {
    // E[tau] from (1, 1) by exact dynamic programming over the killed walk, depth 400
    const auto w = builtin_walk("diagonal");
    const int N = 400, R = N + 2;
    std::vector<double> cur(static_cast<std::size_t>(R * R), 0.0), nxt(cur.size());
    cur[1 * R + 1] = 1.0;
    std::vector<std::tuple<int, int, double>> steps;
    for (const auto& at : w.atoms) steps.emplace_back(at.dy1, at.dy2, at.p.convert_to<double>());
    double expect = 0;
    for (int n = 0; n < N; ++n) {
        double alive = 0;
        for (double v : cur) alive += v;
        expect += alive;  // P(tau > n)
        std::fill(nxt.begin(), nxt.end(), 0.0);
        const int hi = std::min(R - 1, n + 3);
        for (int a = 1; a < hi; ++a)
            for (int b = 1; b < hi; ++b) {
                const double v = cur[a * R + b];
                if (v == 0) continue;
                for (const auto& [d1, d2, p] : steps) {
                    const int a2 = a + d1, b2 = b + d2;
                    if (a2 <= 0 || b2 <= 0) continue;
                    nxt[a2 * R + b2] += v * p;
                }
            }
        std::swap(cur, nxt);
    }
    // the tail P(tau > n) decays like n^{-3/2}; the truncated sum lies below 2 within the tail bound
    EXPECT_LT(expect, 2.0);
    EXPECT_GT(expect, 2.0 - 0.3);
}
