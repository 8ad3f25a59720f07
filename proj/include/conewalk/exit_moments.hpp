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

#ifndef CONEWALK_EXIT_MOMENTS_HPP
#define CONEWALK_EXIT_MOMENTS_HPP

#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <algorithm>
#include <vector>

#include "conewalk/harmonic.hpp"

namespace conewalk {

namespace detail {
/// Guard band for comparing a degree against pi / alpha in float.
inline const BigFloat& resonance_guard() {
    static const BigFloat g("1e-9");
    return g;
}

/// True when n < pi / alpha (with the guard band for general angles).
template <class F>
bool below_resonance(const ConeSpec<F>& cone, const BigFloat& n) {
    if (cone.mode == ConeSpec<F>::Mode::integer_m) return n < BigFloat(cone.m);
    return n < cone.p_alpha - resonance_guard();
}

template <class F>
void check_cone_for_poisson(const ConeSpec<F>& cone) {
    if (cone.half_plane) throw Error("angle-out-of-range", "the half-plane has no polynomial Poisson solutions");
    if (!(cone.p_alpha > 0)) throw Error("degenerate-angle", "cone has no opening");
}
}  // namespace detail

/// Unique F of degree n with L_X F = f and F = 0 on both rays (n < pi / alpha).
/// A non-zero `shuffle_seed` permutes the rows of every linear system before
/// elimination; the result does not depend on it.
template <class F>
Poly<F> poisson_solve(const Poly<F>& f, const ConeSpec<F>& cone, const MomentTable<F>& mu, int n,
                      std::uint64_t shuffle_seed = 0) {
    detail::check_cone_for_poisson(cone);
    if (!detail::below_resonance(cone, BigFloat(n)))
        throw Error("degree-too-high", "degree " + std::to_string(n) + " is not below pi/alpha");
    if (f.degree() > n - 2) throw Error("domain-error", "right-hand side degree exceeds n - 2");
    if (mu.order < n)
        throw Error("insufficient-moments", "need moments up to order " + std::to_string(n) + ", table has " +
                                                std::to_string(mu.order));
    Poly<F> sol;
    for (int l = n; l >= 2; --l) {
        const Poly<F> diff = f - apply_lx(sol, mu).output;
        std::vector<F> c(l - 1);
        for (int s = 0; s <= l - 2; ++s) c[s] = diff.coeff(l - 2 - s, s);
        const auto M = build_matrix(l, cone);
        std::vector<F> a;
        if (shuffle_seed == 0) {
            a = solve_system(M, detail::system_rhs(c));
        } else {
            std::vector<std::size_t> perm(l + 1);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            std::mt19937_64 rng(shuffle_seed + static_cast<std::uint64_t>(l));
            std::shuffle(perm.begin(), perm.end(), rng);
            const auto rhs = detail::system_rhs(c);
            Matrix<F> rows;
            std::vector<F> prhs;
            for (auto i : perm) {
                rows.push_back(M.rows[i]);
                prhs.push_back(rhs[i]);
            }
            auto x = solve_linear(rows, prhs);
            if (!x) throw Error("singular-angle", "M_{" + std::to_string(l) + ",b} is singular");
            a = *x;
        }
        for (int i = 0; i <= l; ++i) sol.add_term(l - i, i, a[i]);
    }
    return sol;
}

template <class F>
struct MomentPolyResult {
    int k = 0;
    Poly<F> G;
    Poly<F> rhs;       // g_k
    Poly<F> residual;  // L_X G_k - g_k
    BigFloat scale = 1;
};

/// x2 (x1 b - x2), the first exit-time moment (x2 x1 for the vertical cone is excluded upstream).
template <class F>
Poly<F> first_moment_poly(const ConeSpec<F>& cone) {
    if (!cone.b) throw Error("moment-not-finite", "E[tau] is infinite for alpha = pi/2");
    return Poly<F>::monomial(1, 1, *cone.b) - Poly<F>::monomial(0, 2);
}

/// Recursive exit-time moment polynomials with a memo per (cone, moment table).
template <class F>
class TauMomentSolver {
   public:
    TauMomentSolver(ConeSpec<F> cone, MomentTable<F> mu) : cone_(std::move(cone)), mu_(std::move(mu)) {}

    const ConeSpec<F>& cone() const { return cone_; }

    MomentPolyResult<F> solve(int k) {
        if (k < 1) throw Error("domain-error", "moment order k must be >= 1");
        if (!detail::below_resonance(cone_, BigFloat(2 * k)))
            throw Error("moment-not-finite", "E[tau^" + std::to_string(k) + "] is infinite: need k < pi/(2 alpha)");
        std::lock_guard<std::mutex> lock(mutex_);
        return solve_locked(k);
    }

   private:
    MomentPolyResult<F> solve_locked(int k) {
        if (auto it = memo_.find(k); it != memo_.end()) return it->second;
        if (mu_.order < 2 * k)
            throw Error("insufficient-moments", "need moments up to order " + std::to_string(2 * k));
        MomentPolyResult<F> r;
        r.k = k;
        r.rhs = Poly<F>::constant(from_int<F>(-1));
        for (int l = 1; l < k; ++l) {
            const auto& Gl = solve_locked(l).G;
            r.rhs -= (Gl + apply_lx(Gl, mu_).output) * binomial_as<F>(k, l);
        }
        if (k == 1) {
            r.G = first_moment_poly(cone_);
        } else {
            r.G = poisson_solve(r.rhs, cone_, mu_, 2 * k);
        }
        const auto lx = apply_lx(r.G, mu_);
        r.residual = lx.output - r.rhs;
        r.scale = std::max({BigFloat(1), max_abs_coeff(r.G), max_abs_coeff(r.rhs), max_abs_coeff(lx.remainder)});
        memo_.emplace(k, r);
        return r;
    }

    ConeSpec<F> cone_;
    MomentTable<F> mu_;
    std::map<int, MomentPolyResult<F>> memo_;
    std::mutex mutex_;
};

template <class F>
MomentPolyResult<F> tau_moment_poly(int k, const ConeSpec<F>& cone, const MomentTable<F>& mu) {
    TauMomentSolver<F> solver(cone, mu);
    return solver.solve(k);
}

template <class F>
struct ExitPositionMoments {
    F mean1, mean2;
    std::optional<F> second1, second2;  // present when alpha < pi/2
};

/// Closed-form means and second moments of the exit position from x.
template <class F>
ExitPositionMoments<F> exit_position_moments(const ConeSpec<F>& cone, const F& x1, const F& x2,
                                              bool need_second = true) {
    if (cone.half_plane) throw Error("angle-out-of-range", "exit-position means need alpha < pi");
    ExitPositionMoments<F> out{x1, x2, std::nullopt, std::nullopt};
    const bool acute = cone.b && field_traits<F>::sign(*cone.b) > 0;
    if (!acute) {
        if (need_second) throw Error("angle-out-of-range", "second exit-position moments need alpha < pi/2");
        return out;
    }
    const F g = first_moment_poly(cone).evaluate(x1, x2);
    out.second1 = x1 * x1 + g;
    out.second2 = x2 * x2 + g;
    return out;
}

}  // namespace conewalk

#endif  // CONEWALK_EXIT_MOMENTS_HPP
