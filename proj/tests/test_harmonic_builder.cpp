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

#include <gtest/gtest.h>

#include "conewalk/harmonic.hpp"

using namespace conewalk;

namespace {

using PQ = Poly<Quadratic>;
using PR = Poly<Rational>;

const Quadratic r3 = Quadratic::sqrt_of(3);

template <class F>
MomentTable<F> random_table(int order, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(-9, 9);
    auto t = normalized_table<F>(order);
    for (int s = 3; s <= order; ++s)
        for (int k = 0; k <= s; ++k) t.set(k, s - k, from_rational<F>(Rational(u(rng), 4)));
    return t;
}

/// E h(x + T dy) - h(x), expanded without the moment table.
template <class F>
Poly<F> walk_shift(const Poly<F>& h, const WalkSpec& w, const Transform<F>& T) {
    Poly<F> acc;
    for (const auto& a : w.atoms) {
        const auto [d1, d2] = T.apply(a.dy1, a.dy2);
        const Poly<F> s1 = Poly<F>::x1() + Poly<F>::constant(d1);
        const Poly<F> s2 = Poly<F>::x2() + Poly<F>::constant(d2);
        Poly<F> shifted;
        for (const auto& [e, c] : h.terms()) shifted += power(s1, e.first) * power(s2, e.second) * c;
        acc += shifted * from_rational<F>(a.p);
    }
    return acc - h;
}

std::string error_kind(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return "";
}

}  // namespace

TEST(ConstructHarmonic, DegreeThreeClosedForm) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const auto mu = random_table<Quadratic>(3, seed);
        const auto res = construct_harmonic(make_cone<Quadratic>(3), mu);
        const Quadratic B = Quadratic(-3) * mu(2, 1) + mu(0, 3);
        const Quadratic C = Quadratic(3) * r3 * mu(2, 1) - r3 * mu(0, 3);
        EXPECT_EQ(res.h, u_poly<Quadratic>(3) + PQ::monomial(0, 2, B) + PQ::monomial(1, 1, C));
        EXPECT_TRUE(res.residual.is_zero());
        EXPECT_TRUE(res.boundary_ok);
    }
}

TEST(ConstructHarmonic, DegreeTwoHasNoCorrection) {
    const auto res = construct_harmonic(make_cone<Rational>(2), random_table<Rational>(4, 7));
    EXPECT_EQ(res.h, PR::monomial(1, 1, 2));
    EXPECT_TRUE(res.correction.is_zero());
}

TEST(ConstructHarmonic, DegreeOne) {
    EXPECT_EQ(construct_harmonic(make_cone<Rational>(1), normalized_table<Rational>(2)).h, PR::x2());
}

TEST(ConstructHarmonic, RightAngleWalksAgainstSymbolicShift) {
    for (const char* name : {"m4-sym", "m4-asym"}) {
        const auto w = builtin_walk(name);
        const auto T = build_transform<Rational>(w);
        ASSERT_EQ(T.cone.m, 4);
        const auto res = construct_harmonic(T.cone, push_moments(w, T, 4), {.cross_check = true});
        EXPECT_TRUE(walk_shift(res.h, w, T).is_zero()) << name;
        EXPECT_EQ(res.h.homogeneous_part(4), u_poly<Rational>(4));
        EXPECT_LE(res.correction.degree(), 3);
    }
}

TEST(ConstructHarmonic, QuadraticFieldWalks) {
    for (const char* name : {"diagonal", "m3-asym", "m6-sym"}) {
        const auto w = builtin_walk(name);
        const auto T = build_transform<Quadratic>(w);
        const auto res = construct_harmonic(T.cone, push_moments(w, T, T.cone.m), {.cross_check = true});
        EXPECT_TRUE(walk_shift(res.h, w, T).is_zero()) << name;
        EXPECT_TRUE(res.boundary_ok) << name;
    }
}

TEST(ConstructHarmonic, RandomTablesUpToSeven) {
    for (int m : {2, 4}) EXPECT_TRUE(construct_harmonic(make_cone<Rational>(m), random_table<Rational>(m, 11)).residual.is_zero());
    EXPECT_TRUE(construct_harmonic(make_cone<Quadratic>(3), random_table<Quadratic>(3, 12)).residual.is_zero());
    PrecisionScope scope(256);
    const BigFloat tol = ldexp(BigFloat(1), -128);
    for (int m = 5; m <= 7; ++m) {
        const auto res = construct_harmonic(make_cone<BigFloat>(m), random_table<BigFloat>(m, 13));
        EXPECT_LE(res.residual_norm, tol * res.scale) << m;
        EXPECT_TRUE(res.boundary_ok) << m;
    }
}

TEST(ConstructHarmonic, InsufficientMoments) {
    EXPECT_EQ(error_kind([] { construct_harmonic(make_cone<Rational>(4), normalized_table<Rational>(3)); }),
              "insufficient-moments");
    EXPECT_EQ(error_kind([] { construct_harmonic(make_cone_from_b(Rational(2)), normalized_table<Rational>(3)); }),
              "domain-error");
}

TEST(ConstructHarmonic, WalkPositivity) {
    for (const char* name : {"m4-sym", "m4-asym"}) {
        const auto w = builtin_walk(name);
        const auto T = build_transform<Rational>(w);
        const auto h = construct_harmonic(T.cone, push_moments(w, T, 4)).h;
        for (long y1 = 0; y1 <= 50; ++y1)
            for (long y2 = 0; y1 * y1 + y2 * y2 <= 2500; ++y2) {
                const auto [x1, x2] = T.apply(y1, y2);
                EXPECT_GE(h.evaluate(x1, x2), 0) << name << " " << y1 << "," << y2;
            }
    }
}

TEST(ConstructHarmonic, DivisibleByBoundaryLines) {
    const auto w = builtin_walk("diagonal");
    const auto T = build_transform<Quadratic>(w);
    const auto h = construct_harmonic(T.cone, push_moments(w, T, 3)).h;
    const auto q = divide_by_linear(h, Quadratic(0), Quadratic(1));
    EXPECT_TRUE(q.remainder.is_zero());
    const auto q2 = divide_by_linear(q.quotient, r3, Quadratic(-1));
    EXPECT_TRUE(q2.remainder.is_zero());
}

TEST(LowDegreeUniqueness, Examples) {
    const auto cone4 = make_cone<Rational>(4);
    const auto mu = random_table<Rational>(4, 3);
    EXPECT_TRUE(check_low_degree_uniqueness(cone4, mu, PR()));
    EXPECT_EQ(error_kind([&] { check_low_degree_uniqueness(cone4, mu, PR::monomial(1, 1, 2)); }),
              "precondition-violation");
    // m = 5: the homogeneous tower only has the trivial solution
    PrecisionScope scope(256);
    const auto cone5 = make_cone<BigFloat>(5);
    const auto mu5 = random_table<BigFloat>(5, 4);
    const auto f = homogeneous_tower(cone5, mu5, 4);
    EXPECT_TRUE(negligible(f, BigFloat(1)));
}

TEST(ConverseAngle, Examples) {
    const auto a = converse_angle_test(4, make_cone<Rational>(4));
    EXPECT_TRUE(a.resonant);
    EXPECT_EQ(a.q, 1);
    EXPECT_TRUE(a.positive_kernel);
    const auto v = converse_angle_test(4, make_cone<Rational>(2));
    EXPECT_TRUE(v.resonant);
    EXPECT_EQ(v.q, 2);
    EXPECT_FALSE(v.positive_kernel);
    EXPECT_FALSE(converse_angle_test(3, make_cone<Rational>(4)).resonant);
    const auto g = converse_angle_test(5, make_cone_from_b(Rational(3)));
    EXPECT_FALSE(g.resonant);
}
