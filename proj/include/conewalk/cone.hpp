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

#ifndef CONEWALK_CONE_HPP
#define CONEWALK_CONE_HPP

#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "conewalk/poly.hpp"

namespace conewalk {

/// Value of tan(q pi / n) in the quadratic fields we support, or nullopt.
/// `vertical` is set when the angle is pi/2 modulo pi.
struct ExactTan {
    bool vertical = false;
    Quadratic value;
};

inline std::optional<ExactTan> exact_tan(long q, long n) {
    if (n <= 0) throw Error("domain-error", "exact_tan requires n > 0");
    q %= n;
    if (q < 0) q += n;
    if (q == 0) return ExactTan{false, Quadratic(0)};
    const long g = std::gcd(q, n);
    const long qq = q / g;
    const long nn = n / g;
    const Quadratic r3 = Quadratic::sqrt_of(3);
    const Quadratic r2 = Quadratic::sqrt_of(2);
    auto val = [](const Quadratic& v) { return std::optional<ExactTan>(ExactTan{false, v}); };
    switch (nn) {
        case 2:
            return ExactTan{true, Quadratic(0)};
        case 3:
            return val(qq == 1 ? r3 : -r3);
        case 4:
            return val(Quadratic(qq == 1 ? 1 : -1));
        case 6:
            return val(qq == 1 ? r3 / Quadratic(3) : -r3 / Quadratic(3));
        case 8: {
            const Quadratic lo = r2 - Quadratic(1);
            const Quadratic hi = r2 + Quadratic(1);
            if (qq == 1) return val(lo);
            if (qq == 3) return val(hi);
            if (qq == 5) return val(-hi);
            return val(-lo);
        }
        case 12: {
            const Quadratic lo = Quadratic(2) - r3;
            const Quadratic hi = Quadratic(2) + r3;
            if (qq == 1) return val(lo);
            if (qq == 5) return val(hi);
            if (qq == 7) return val(-hi);
            return val(-lo);
        }
        default:
            return std::nullopt;
    }
}

/// Wedge between the rays x2 = 0 and x2 = b x1 (or the x2-axis when vertical).
template <class F>
struct ConeSpec {
    enum class Mode { integer_m, general };

    Mode mode = Mode::general;
    int m = 0;  // meaningful when mode == integer_m
    std::optional<F> b;  // nullopt: the second ray is the positive x2-axis
    bool half_plane = false;
    BigFloat p_alpha = 0;  // pi / alpha

    bool vertical() const { return !b.has_value() && !half_plane; }
    BigFloat alpha() const { return big_pi() / p_alpha; }

    /// A point on the second boundary ray.
    std::pair<F, F> ray_point() const {
        if (half_plane) return {from_int<F>(-1), from_int<F>(0)};
        if (!b) return {from_int<F>(0), from_int<F>(1)};
        return {from_int<F>(1), *b};
    }

    std::string describe() const {
        std::string out = mode == Mode::integer_m ? "pi/" + std::to_string(m) : "general";
        if (half_plane) return out + " (half-plane)";
        if (!b) return out + " (vertical)";
        return out + ", b = " + scalar_to_string(*b);
    }
};

namespace detail {
inline BigFloat tan_pi_over(int m) { return tan(big_pi() / BigFloat(m)); }

template <class F>
F float_tan(const BigFloat& angle) {
    return convert_scalar<F>(BigFloat(tan(angle)));
}
}  // namespace detail

/// Cone K_{pi/m}. Exact backends only accept m whose tangent lies in the field.
template <class F>
ConeSpec<F> make_cone(int m) {
    if (m < 1) throw Error("domain-error", "make_cone requires m >= 1");
    ConeSpec<F> c;
    c.mode = ConeSpec<F>::Mode::integer_m;
    c.m = m;
    c.p_alpha = BigFloat(m);
    if (m == 1) {
        c.half_plane = true;
        c.b = from_int<F>(0);
        return c;
    }
    if (m == 2) return c;
    if constexpr (std::is_same_v<F, Rational>) {
        if (m != 4)
            throw Error("angle-not-representable",
                        "tan(pi/" + std::to_string(m) + ") is not rational; use a quadratic or float backend");
        c.b = Rational(1);
    } else if constexpr (std::is_same_v<F, Quadratic>) {
        const auto t = exact_tan(1, m);
        if (!t)
            throw Error("angle-not-representable",
                        "tan(pi/" + std::to_string(m) + ") is not in a supported quadratic field; use a float backend");
        c.b = t->value;
    } else {
        c.b = detail::float_tan<F>(big_pi() / BigFloat(m));
    }
    return c;
}

/// Quadratic-field variant restricted to Q(sqrt d); throws if tan(pi/m) lies elsewhere.
inline ConeSpec<Quadratic> make_cone_in_field(int m, std::int64_t d) {
    auto c = make_cone<Quadratic>(m);
    if (c.b && !c.b->is_rational() && c.b->radicand() != d)
        throw Error("angle-not-representable",
                    "tan(pi/" + std::to_string(m) + ") lies in Q(sqrt " + std::to_string(c.b->radicand()) +
                        "), not Q(sqrt " + std::to_string(d) + ")");
    return c;
}

/// Cone with second ray x2 = b x1 (b < 0 gives an obtuse wedge). Detects alpha = pi/m.
template <class F>
ConeSpec<F> make_cone_from_b(const F& b) {
    if (field_traits<F>::sign(b) == 0) throw Error("degenerate-angle", "b = 0 gives an empty wedge");
    const BigFloat bf = field_traits<F>::to_bigfloat(b);
    BigFloat alpha = atan(bf);
    if (alpha < 0) alpha += big_pi();
    ConeSpec<F> c;
    c.b = b;
    c.p_alpha = big_pi() / alpha;
    const BigFloat rounded = round(c.p_alpha);
    if (abs(c.p_alpha - rounded) < ldexp(BigFloat(1), 8 - static_cast<int>(float_precision() / 2)) && rounded >= 3 && rounded < 1000) {
        const int m = rounded.convert_to<int>();
        bool exact_match = true;
        if constexpr (is_exact_v<F>) exact_match = field_traits<F>::is_zero(u_poly<F>(m).evaluate(from_int<F>(1), b));
        if (exact_match) {
            c.mode = ConeSpec<F>::Mode::integer_m;
            c.m = m;
            c.p_alpha = BigFloat(m);
        }
    }
    return c;
}

/// Vertical cone (alpha = pi/2).
template <class F>
ConeSpec<F> make_vertical_cone() {
    return make_cone<F>(2);
}

/// Float cone from an opening angle alpha in (0, pi].
template <class F>
ConeSpec<F> make_cone_from_alpha(const BigFloat& alpha) {
    static_assert(!is_exact_v<F>, "general angles need a float backend");
    const BigFloat pi = big_pi();
    if (!(alpha > 0) || alpha > pi) throw Error("domain-error", "alpha must lie in (0, pi]");
    const BigFloat ratio = pi / alpha;
    const BigFloat rounded = round(ratio);
    if (abs(ratio - rounded) < ldexp(BigFloat(1), 8 - static_cast<int>(float_precision() / 2)) && rounded >= 1) return make_cone<F>(rounded.convert_to<int>());
    ConeSpec<F> c;
    c.b = detail::float_tan<F>(alpha);
    c.p_alpha = ratio;
    return c;
}

/// Ratio u_{pi/m}(x) / (|x|^{m-1} delta(x)) for a point strictly inside K_{pi/m}.
inline BigFloat bm1_ratio(int m, const Rational& x1, const Rational& x2) {
    if (m < 1) throw Error("domain-error", "bm1_ratio requires m >= 1");
    const BigFloat X1(x1), X2(x2);
    const BigFloat alpha = big_pi() / BigFloat(m);
    const BigFloat phi = atan2(X2, X1);
    const BigFloat r = sqrt(X1 * X1 + X2 * X2);
    if (r == 0 || phi < 0 || phi > alpha) throw Error("outside-wedge", "point is not in the closed wedge");
    // distance to each boundary half-line
    auto dist = [&](const BigFloat& c, const BigFloat& s) {
        const BigFloat along = X1 * c + X2 * s;
        if (along <= 0) return r;
        return abs(X2 * c - X1 * s);
    };
    const BigFloat d1 = dist(BigFloat(1), BigFloat(0));
    const BigFloat d2 = dist(cos(alpha), sin(alpha));
    const BigFloat delta = d1 < d2 ? d1 : d2;
    const BigFloat tol = ldexp(BigFloat(1), -static_cast<int>(float_precision() / 2)) * r;
    if (delta <= tol) throw Error("boundary-point", "point lies on the wedge boundary");
    const BigFloat u = u_poly<Rational>(m).evaluate_as<BigFloat>(X1, X2);
    return u / (pow(r, m - 1) * delta);
}

}  // namespace conewalk

#endif  // CONEWALK_CONE_HPP
