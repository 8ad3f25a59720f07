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

#ifndef CONEWALK_ALT_CONSTRUCTION_HPP
#define CONEWALK_ALT_CONSTRUCTION_HPP

#include <vector>

#include "conewalk/harmonic.hpp"

namespace conewalk {

/// Chebyshev T_l as ascending coefficients.
inline std::vector<Rational> chebyshev_T(int l) {
    if (l < 0) throw Error("domain-error", "chebyshev_T requires l >= 0");
    std::vector<Rational> prev{1}, cur{0, 1};
    if (l == 0) return prev;
    for (int k = 1; k < l; ++k) {
        std::vector<Rational> next(cur.size() + 1, 0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2 * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Chebyshev U_l as ascending coefficients (U_{-1} = 0).
inline std::vector<Rational> chebyshev_U(int l) {
    if (l < -1) throw Error("domain-error", "chebyshev_U requires l >= -1");
    if (l == -1) return {};
    std::vector<Rational> prev{1}, cur{0, 2};
    if (l == 0) return prev;
    for (int k = 1; k < l; ++k) {
        std::vector<Rational> next(cur.size() + 1, 0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2 * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

namespace detail {
inline Poly<Rational> radius_squared_power(int e) {
    return power(Poly<Rational>::monomial(2, 0) + Poly<Rational>::monomial(0, 2), e);
}

/// r^l p(x1 / r) for p of parity l, as a polynomial in (x1, x2).
inline Poly<Rational> homogenize_even(const std::vector<Rational>& p, int l) {
    Poly<Rational> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0) continue;
        const int rest = l - static_cast<int>(i);
        out += Poly<Rational>::monomial(static_cast<int>(i), 0, p[i]) * radius_squared_power(rest / 2);
    }
    return out;
}
}  // namespace detail

/// r^l cos(l beta) = r^l T_l(cos beta) as a polynomial.
inline Poly<Rational> polar_cos(int l) { return detail::homogenize_even(chebyshev_T(l), l); }

/// r^l sin(l beta) = x2 r^{l-1} U_{l-1}(cos beta) as a polynomial.
inline Poly<Rational> polar_sin(int l) {
    if (l == 0) return {};
    return Poly<Rational>::x2() * detail::homogenize_even(chebyshev_U(l - 1), l - 1);
}

/// cos^j sin^k = sum_l kappa_l cos(l beta) + mu_l sin(l beta).
struct FourierProfile {
    int n = 0;
    std::vector<Rational> kappa;
    std::vector<Rational> mu;
    int parity() const { return n % 2; }
};

inline FourierProfile fourier_profile(int j, int k) {
    if (j < 0 || k < 0) throw Error("domain-error", "fourier_profile requires j, k >= 0");
    const int n = j + k;
    // complex coefficient of e^{i nu beta}, nu = n - 2(w + s), before the factor i^{-k}
    std::vector<Rational> z(2 * n + 1, 0);
    for (int w = 0; w <= j; ++w)
        for (int s = 0; s <= k; ++s) {
            Rational c = Rational(binomial(j, w) * binomial(k, s));
            if (s % 2) c = -c;
            z[n - 2 * (w + s) + n] += c;
        }
    Rational scale = 1;
    for (int i = 0; i < n; ++i) scale /= 2;
    // i^{-k} by k mod 4: 1, -i, -1, i
    const int phase = k % 4;
    FourierProfile fp;
    fp.n = n;
    fp.kappa.assign(n + 1, 0);
    fp.mu.assign(n + 1, 0);
    for (int nu = -n; nu <= n; ++nu) {
        const Rational c = z[nu + n] * scale;
        if (c == 0) continue;
        const int l = nu < 0 ? -nu : nu;
        const int sg = nu < 0 ? -1 : 1;
        // c * i^{-k} * e^{i nu beta}: real part only (the sum is real)
        switch (phase) {
            case 0:  // c cos(nu beta)
                fp.kappa[l] += c;
                break;
            case 1:  // -i c e^{i nu beta} -> c sin(nu beta)
                fp.mu[l] += c * sg;
                break;
            case 2:  // -c cos(nu beta)
                fp.kappa[l] -= c;
                break;
            default:  // i c e^{i nu beta} -> -c sin(nu beta)
                fp.mu[l] -= c * sg;
                break;
        }
    }
    return fp;
}

/// Homogeneous f_{j,k} of degree j+k+2 with Laplacian x1^j x2^k.
inline Poly<Rational> particular_solution(int j, int k) {
    const FourierProfile fp = fourier_profile(j, k);
    const int n = fp.n;
    Poly<Rational> out;
    for (int l = 0; l <= n; ++l) {
        const Rational d = Rational((n + 2) * (n + 2) - l * l);
        const Poly<Rational> r_pow = detail::radius_squared_power((n + 2 - l) / 2);
        if (fp.kappa[l] != 0) out += r_pow * polar_cos(l) * (fp.kappa[l] / d);
        if (fp.mu[l] != 0) out += r_pow * polar_sin(l) * (fp.mu[l] / d);
    }
    return out;
}

/// Harmonic g = A g1 + B g2 such that fp + g vanishes on both rays.
/// g1 = Im(x1 + i x2)^N vanishes on x2 = 0; g2 = Im((x1 + i x2)(c - i s))^N on the second ray.
template <class F>
struct HarmonicCorrection {
    Poly<F> g;
    Poly<F> g1, g2;
    F a_hat, b_hat;
};

template <class F>
HarmonicCorrection<F> harmonic_correction(const Poly<F>& fp, const ConeSpec<F>& cone, int n) {
    if (cone.mode != ConeSpec<F>::Mode::integer_m) throw Error("domain-error", "harmonic_correction needs alpha = pi/m");
    if (n + 2 >= cone.m)
        throw Error("resonant-degree", "degree " + std::to_string(n + 2) + " is not below m = " + std::to_string(cone.m));
    const int N = n + 2;
    const auto [c, s] = cone.ray_point();
    HarmonicCorrection<F> out;
    out.g1 = u_poly<F>(N);
    // (x1 + i x2)(c - i s) = (c x1 + s x2) + i (c x2 - s x1)
    out.g2 = substitute_linear(out.g1, c, s, -s, c);
    const F one = from_int<F>(1), zero = from_int<F>(0);
    const F fp_axis = fp.evaluate(one, zero);
    const F fp_ray = fp.evaluate(c, s);
    const F g1_ray = out.g1.evaluate(c, s);
    const F g2_axis = out.g2.evaluate(one, zero);
    const BigFloat scale = std::max(BigFloat(1), max_abs_coeff(out.g1));
    if (negligible(g1_ray, scale) || negligible(g2_axis, scale))
        throw Error("internal-error", "boundary correction system is singular below the resonant degree");
    out.a_hat = -fp_ray / g1_ray;
    out.b_hat = -fp_axis / g2_axis;
    out.g = out.g1 * out.a_hat + out.g2 * out.b_hat;
    return out;
}

/// F_{j,k} = f_{j,k} + g_{j,k}: Laplacian x1^j x2^k and zero on both rays.
template <class F>
Poly<F> eliminator(int j, int k, const ConeSpec<F>& cone) {
    const Poly<F> fp = poly_cast<F>(particular_solution(j, k));
    return fp + harmonic_correction(fp, cone, j + k).g;
}

/// Rebuilds the harmonic polynomial by cancelling the top part of the running residual.
template <class F>
Poly<F> build_harmonic_alt(const ConeSpec<F>& cone, const MomentTable<F>& mu) {
    detail::require_integer_cone(cone);
    const int m = cone.m;
    if (m == 1) return Poly<F>::x2();
    if (mu.order < m)
        throw Error("insufficient-moments", "need moments up to order " + std::to_string(m));
    mu.validate();
    Poly<F> h = u_poly<F>(m);
    for (int l = m - 1; l >= 2; --l) {
        const Poly<F> part = apply_lx(h, mu).output.homogeneous_part(l - 2);
        // half Laplacian of the new block must cancel `part`
        for (const auto& [e, c] : part.terms()) h -= eliminator(e.first, e.second, cone) * (c * from_int<F>(2));
    }
    return h;
}

}  // namespace conewalk

#endif  // CONEWALK_ALT_CONSTRUCTION_HPP
