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

#ifndef CONEWALK_HARMONIC_HPP
#define CONEWALK_HARMONIC_HPP

#include <cmath>
#include <string>
#include <vector>

#include "conewalk/laplace_system.hpp"
#include "conewalk/lx.hpp"

namespace conewalk {

template <class F>
struct HarmonicResult {
    int m = 0;
    Poly<F> h;
    Poly<F> correction;
    Poly<F> residual;
    BigFloat residual_norm = 0;
    BigFloat scale = 1;  // largest coefficient seen while building, for float tolerances
    bool residual_ok = false;
    bool boundary_ok = false;
};

struct HarmonicOptions {
    bool cross_check = false;  // run the split solver and the indexed right-hand side alongside
};

/// True when f vanishes on both boundary rays of the cone.
template <class F>
bool vanishes_on_boundary(const Poly<F>& f, const ConeSpec<F>& cone, const BigFloat& scale = BigFloat(1)) {
    if (!vanishes_on_direction(f, from_int<F>(1), from_int<F>(0), scale)) return false;
    const auto [c, s] = cone.ray_point();
    return vanishes_on_direction(f, c, s, scale);
}

/// Degree n-2 right-hand side from the coefficient-index form: for every built
/// degree i > n and monomial a_{i,j} x1^{i-j} x2^j, collect the moment weights
/// landing on x1^{n-2-s} x2^s.
template <class F>
std::vector<F> indexed_rhs(const Poly<F>& tail, int n, int top, const MomentTable<F>& mu) {
    std::vector<F> c(n - 1, from_int<F>(0));
    for (int s = 0; s <= n - 2; ++s) {
        for (int i = n + 1; i <= top; ++i) {
            for (int j = 0; j <= i; ++j) {
                const F a = tail.coeff(i - j, j);
                if (field_traits<F>::is_zero(a)) continue;
                const Integer w = binomial(j, s) * binomial(i - j, n - 2 - s);
                if (w == 0) continue;
                const int e2 = std::max(j - s, 0);
                const int e1 = std::max(i - j - n + 2 + s, 0);
                c[s] = c[s] - from_rational<F>(Rational(w)) * mu.at(e1, e2) * a;
            }
        }
    }
    return c;
}

namespace detail {
template <class F>
void require_integer_cone(const ConeSpec<F>& cone) {
    if (cone.mode != ConeSpec<F>::Mode::integer_m)
        throw Error("domain-error", "harmonic polynomials need an opening angle pi/m");
}

template <class F>
std::vector<F> system_rhs(const std::vector<F>& c) {
    std::vector<F> rhs = c;
    rhs.push_back(from_int<F>(0));
    rhs.push_back(from_int<F>(0));
    return rhs;
}

template <class F>
bool vectors_agree(const std::vector<F>& a, const std::vector<F>& b, const BigFloat& scale) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!negligible(F(a[i] - b[i]), scale)) return false;
    return true;
}
}  // namespace detail

/// h = u_{pi/m} + r_m with L_X h = 0 and h = 0 on both rays.
template <class F>
HarmonicResult<F> construct_harmonic(const ConeSpec<F>& cone, const MomentTable<F>& mu, HarmonicOptions opts = {}) {
    detail::require_integer_cone(cone);
    const int m = cone.m;
    HarmonicResult<F> out;
    out.m = m;
    if (m == 1) {
        out.h = Poly<F>::x2();
        out.residual_ok = out.boundary_ok = true;
        return out;
    }
    if (mu.order < m)
        throw Error("insufficient-moments", "need moments up to order " + std::to_string(m) + ", table has " +
                                                std::to_string(mu.order));
    mu.validate();
    const Poly<F> top = u_poly<F>(m);
    Poly<F> h = top;
    BigFloat scale = std::max(BigFloat(1), max_abs_coeff(h));
    for (int l = m - 1; l >= 2; --l) {
        const auto lx = apply_lx(h, mu);
        scale = std::max(scale, max_abs_coeff(lx.remainder));
        // c[s] is minus the coefficient of x1^{l-2-s} x2^s in L_X of the part built so far
        std::vector<F> c(l - 1);
        for (int s = 0; s <= l - 2; ++s) c[s] = -lx.output.coeff(l - 2 - s, s);
        const auto M = build_matrix(l, cone);
        std::vector<F> a;
        try {
            a = solve_system(M, detail::system_rhs(c));
        } catch (const Error& e) {
            if (e.kind() == "singular-angle")
                throw Error("internal-error", "resonant sub-degree " + std::to_string(l) + " below m = " +
                                                  std::to_string(m));
            throw;
        }
        if (opts.cross_check) {
            const auto c_indexed = indexed_rhs(h, l, m, mu);
            if (!detail::vectors_agree(c, c_indexed, scale))
                throw Error("internal-error", "indexed right-hand side disagrees with the Taylor expansion at degree " +
                                                  std::to_string(l));
            if (M.b) {
                const auto a_split = solve_split(M, detail::system_rhs(c));
                if (!detail::vectors_agree(a, a_split, scale))
                    throw Error("internal-error", "split solver disagrees at degree " + std::to_string(l));
            }
        }
        for (int i = 0; i <= l; ++i) h.add_term(l - i, i, a[i]);
        scale = std::max(scale, max_abs_coeff(h));
    }
    out.h = h;
    out.correction = h - top;
    const auto lx = apply_lx(h, mu);
    scale = std::max(scale, max_abs_coeff(lx.remainder));
    scale = std::max(scale, max_abs_coeff(lx.laplacian_part));
    out.residual = lx.output;
    out.residual_norm = max_abs_coeff(out.residual);
    out.scale = scale;
    out.residual_ok = negligible(out.residual, scale);
    out.boundary_ok = vanishes_on_boundary(h, cone, scale);
    if (out.residual.degree() > -1 && is_exact_v<F>)
        throw Error("internal-error", "residual of the harmonic construction is not zero");
    return out;
}

/// True iff f = 0, for f of degree < m that is harmonic for the walk and vanishes on both rays.
template <class F>
bool check_low_degree_uniqueness(const ConeSpec<F>& cone, const MomentTable<F>& mu, const Poly<F>& f) {
    detail::require_integer_cone(cone);
    if (f.degree() >= cone.m) throw Error("precondition-violation", "degree must be below m");
    const BigFloat scale = std::max(BigFloat(1), max_abs_coeff(f));
    if (!vanishes_on_boundary(f, cone, scale))
        throw Error("precondition-violation", "polynomial does not vanish on both boundary rays");
    if (!negligible(apply_lx(f, mu).output, scale))
        throw Error("precondition-violation", "polynomial is not harmonic for the walk");
    return negligible(f, BigFloat(1));
}

/// Solutions of the homogeneous tower below degree m: each degree l solves
/// M_{l,b} a = (lower-order terms of the part already built); returns the assembled polynomial.
template <class F>
Poly<F> homogeneous_tower(const ConeSpec<F>& cone, const MomentTable<F>& mu, int top) {
    Poly<F> f;
    for (int l = top; l >= 2; --l) {
        const auto lx = apply_lx(f, mu);
        std::vector<F> c(l - 1);
        for (int s = 0; s <= l - 2; ++s) c[s] = -lx.output.coeff(l - 2 - s, s);
        const auto M = build_matrix(l, cone);
        const auto a = solve_system(M, detail::system_rhs(c));
        for (int i = 0; i <= l; ++i) f.add_term(l - i, i, a[i]);
    }
    return f;
}

struct AngleClass {
    bool resonant = false;
    int q = 0;
    int kernel_dimension = 0;
    bool positive_kernel = false;  // u_poly(n) > 0 throughout the open wedge
};

/// Classifies (n, b) by the kernel of M_{n,b}; when resonant, finds q with b = tan(q pi / n).
template <class F>
AngleClass converse_angle_test(int n, const ConeSpec<F>& cone) {
    if (n < 2) throw Error("domain-error", "converse_angle_test requires n >= 2");
    const auto M = build_matrix(n, cone);
    const auto k = kernel_dimension(M);
    AngleClass out;
    out.kernel_dimension = k.dimension;
    if (k.dimension == 0) return out;
    out.resonant = true;
    BigFloat phi;
    if (cone.vertical()) {
        phi = big_pi() / 2;
    } else {
        phi = atan(field_traits<F>::to_bigfloat(*cone.b));
        if (phi < 0) phi += big_pi();
    }
    out.q = round(phi * BigFloat(n) / big_pi()).template convert_to<int>();
    const Poly<Rational> u = u_poly<Rational>(n);
    bool positive = true;
    for (int s = 1; s < 64; ++s) {
        const BigFloat t = phi * BigFloat(s) / 64;
        if (u.evaluate_as<BigFloat>(cos(t), sin(t)) <= 0) positive = false;
    }
    out.positive_kernel = positive;
    return out;
}

}  // namespace conewalk

#endif  // CONEWALK_HARMONIC_HPP
