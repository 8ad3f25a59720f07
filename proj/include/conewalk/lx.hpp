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

#ifndef CONEWALK_LX_HPP
#define CONEWALK_LX_HPP

#include "conewalk/walk.hpp"

namespace conewalk {

template <class F>
struct LxExpansion {
    Poly<F> input;
    Poly<F> output;          // E f(x + X) - f(x)
    Poly<F> laplacian_part;  // half the Laplacian
    Poly<F> remainder;       // terms with k + l >= 3
};

/// Generator of the walk applied to a polynomial through its Taylor expansion.
/// First and second order terms are taken from the normalization, not from mu.
template <class F>
LxExpansion<F> apply_lx(const Poly<F>& f, const MomentTable<F>& mu) {
    const int n = f.degree();
    if (mu.order < n)
        throw Error("insufficient-moments", "moment table of order " + std::to_string(mu.order) +
                                                " for a polynomial of degree " + std::to_string(n));
    LxExpansion<F> out;
    out.input = f;
    out.laplacian_part = laplacian(f) * from_rational<F>(Rational(1, 2));
    for (int s = 3; s <= n; ++s) {
        for (int k = 0; k <= s; ++k) {
            const int l = s - k;
            const F& m = mu.at(k, l);
            if (field_traits<F>::is_zero(m)) continue;
            Poly<F> d = derivative(f, k, l);
            if (d.is_zero()) continue;
            const F w = m / from_rational<F>(Rational(factorial(k) * factorial(l)));
            out.remainder += d * w;
        }
    }
    out.output = out.laplacian_part + out.remainder;
    return out;
}

/// sum_atoms p h(x + T dy) - h(x) at x = T y.
template <class F>
F verify_one_step(const Poly<F>& h, const WalkSpec& w, const Transform<F>& t, long y1, long y2) {
    const auto [x1, x2] = t.apply(y1, y2);
    F acc = from_int<F>(0);
    for (const auto& a : w.atoms) {
        const auto [d1, d2] = t.apply(a.dy1, a.dy2);
        acc = acc + from_rational<F>(a.p) * h.evaluate(x1 + d1, x2 + d2);
    }
    return acc - h.evaluate(x1, x2);
}

/// Same sum at an arbitrary point of the plane.
template <class F>
F verify_one_step_at(const Poly<F>& h, const WalkSpec& w, const Transform<F>& t, const F& x1, const F& x2) {
    F acc = from_int<F>(0);
    for (const auto& a : w.atoms) {
        const auto [d1, d2] = t.apply(a.dy1, a.dy2);
        acc = acc + from_rational<F>(a.p) * h.evaluate(x1 + d1, x2 + d2);
    }
    return acc - h.evaluate(x1, x2);
}

}  // namespace conewalk

#endif  // CONEWALK_LX_HPP
