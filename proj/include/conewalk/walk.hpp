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

#ifndef CONEWALK_WALK_HPP
#define CONEWALK_WALK_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "conewalk/cone.hpp"

namespace conewalk {

struct Atom {
    int dy1 = 0;
    int dy2 = 0;
    Rational p;
};

/// Lattice jump law in quadrant coordinates.
struct WalkSpec {
    std::string name;
    std::vector<Atom> atoms;

    Rational mean1() const { return moment(1, 0); }
    Rational mean2() const { return moment(0, 1); }
    Rational var1() const { return moment(2, 0); }
    Rational var2() const { return moment(0, 2); }
    Rational cov() const { return moment(1, 1); }

    /// E[Y1^k Y2^l].
    Rational moment(int k, int l) const {
        Rational s = 0;
        for (const auto& a : atoms) s += a.p * power(Rational(a.dy1), k) * power(Rational(a.dy2), l);
        return s;
    }

    /// Squared correlation, exact.
    Rational rho_squared() const { return cov() * cov() / (var1() * var2()); }

    BigFloat rho() const { return BigFloat(cov()) / sqrt(BigFloat(var1() * var2())); }

    /// Throws unless probabilities are positive, sum to one, the mean is zero and |rho| < 1.
    void validate() const {
        if (atoms.empty()) throw Error("invalid-walk", "walk has no atoms");
        Rational total = 0;
        for (const auto& a : atoms) {
            if (a.p <= 0) throw Error("invalid-walk", "atom probabilities must be positive");
            total += a.p;
        }
        if (total != 1) throw Error("invalid-walk", "probabilities sum to " + to_string(total) + ", not 1");
        if (mean1() != 0 || mean2() != 0) throw Error("invalid-walk", "walk has non-zero drift");
        if (var1() == 0 || var2() == 0) throw Error("degenerate-correlation", "a coordinate has zero variance");
        if (rho_squared() >= 1) throw Error("degenerate-correlation", "|rho| = 1");
    }
};

/// Sufficient condition for landing exactly on the boundary: every jump component >= -1.
inline bool check_no_overshoot(const WalkSpec& w) {
    for (const auto& a : w.atoms)
        if (a.dy1 < -1 || a.dy2 < -1) return false;
    return true;
}

/// Upper-triangular T with X = T Y standardized, and the opening angle of T(quadrant).
template <class F>
struct Transform {
    F t00, t01, t11;
    ConeSpec<F> cone;
    BigFloat alpha;          // geometric: arccos(-rho)
    BigFloat alpha_formula;  // arctan(sqrt(1 - rho^2) / rho), principal branch (pi/2 when rho = 0)

    std::pair<F, F> apply(const F& y1, const F& y2) const { return {t00 * y1 + t01 * y2, t11 * y2}; }
    std::pair<F, F> apply(long y1, long y2) const { return apply(from_int<F>(y1), from_int<F>(y2)); }

    /// p(T y) as a polynomial in y.
    Poly<F> pull_back(const Poly<F>& p) const { return substitute_linear(p, t00, t01, from_int<F>(0), t11); }
};

namespace detail {
template <class F>
F checked_sqrt(const Rational& r, const char* what) {
    auto v = field_traits<F>::sqrt_rational(r);
    if (!v)
        throw Error("angle-not-representable",
                    std::string("sqrt(") + to_string(r) + ") for " + what + " is not in the " +
                        field_traits<F>::name() + " backend");
    return *v;
}
}  // namespace detail

template <class F>
Transform<F> build_transform(const WalkSpec& w) {
    w.validate();
    const Rational v1 = w.var1(), v2 = w.var2(), c = w.cov();
    const Rational det = v1 * v2 - c * c;
    // T00 = sqrt(v2/det), T01 = -c / sqrt(v2 det), T11 = 1/sqrt(v2)
    const F s00 = detail::checked_sqrt<F>(v2 / det, "T00");
    const F s01 = detail::checked_sqrt<F>(v2 * det, "T01");
    const F s11 = detail::checked_sqrt<F>(v2, "T11");
    if constexpr (std::is_same_v<F, Quadratic>) {
        std::int64_t d = 0;
        for (const Quadratic* q : {&s00, &s01, &s11}) {
            if (q->is_rational()) continue;
            if (d != 0 && d != q->radicand())
                throw Error("angle-not-representable", "transform needs square roots from different quadratic fields");
            d = q->radicand();
        }
    }
    Transform<F> t;
    t.t00 = s00;
    t.t01 = from_rational<F>(-c) / s01;
    t.t11 = from_int<F>(1) / s11;
    const BigFloat rho = w.rho();
    t.alpha = acos(-rho);
    t.alpha_formula = rho == 0 ? big_pi() / 2 : BigFloat(atan(sqrt(1 - rho * rho) / rho));
    if (c == 0)
        t.cone = make_vertical_cone<F>();
    else
        t.cone = make_cone_from_b<F>(t.t11 / t.t01);
    return t;
}

/// Mixed moments E[X1^k X2^l] for k + l <= order.
template <class F>
struct MomentTable {
    int order = 0;
    std::map<std::pair<int, int>, F> mu;

    const F& at(int k, int l) const {
        const auto it = mu.find({k, l});
        if (it == mu.end())
            throw Error("insufficient-moments",
                        "moment (" + std::to_string(k) + "," + std::to_string(l) + ") not in table of order " +
                            std::to_string(order));
        return it->second;
    }
    F operator()(int k, int l) const { return at(k, l); }
    void set(int k, int l, const F& v) { mu[{k, l}] = v; }

    /// Throws unless the table is complete and satisfies the standard normalization.
    void validate() const {
        if (order < 2) throw Error("invalid-moments", "moment order must be at least 2");
        for (int s = 0; s <= order; ++s)
            for (int k = 0; k <= s; ++k)
                if (!mu.count({k, s - k}))
                    throw Error("invalid-moments",
                                "missing moment (" + std::to_string(k) + "," + std::to_string(s - k) + ")");
        auto expect = [&](int k, int l, int v) {
            if (!negligible(F(at(k, l) - from_int<F>(v))))
                throw Error("invalid-moments", "moment (" + std::to_string(k) + "," + std::to_string(l) +
                                                   ") must be " + std::to_string(v));
        };
        expect(0, 0, 1);
        expect(1, 0, 0);
        expect(0, 1, 0);
        expect(2, 0, 1);
        expect(0, 2, 1);
        expect(1, 1, 0);
    }

    friend bool operator==(const MomentTable& a, const MomentTable& b) { return a.order == b.order && a.mu == b.mu; }
};

/// Table with the standard low-order entries and the given higher ones.
template <class F>
MomentTable<F> normalized_table(int order) {
    MomentTable<F> t;
    t.order = order;
    for (int s = 0; s <= order; ++s)
        for (int k = 0; k <= s; ++k) t.set(k, s - k, from_int<F>(0));
    t.set(0, 0, from_int<F>(1));
    t.set(2, 0, from_int<F>(1));
    t.set(0, 2, from_int<F>(1));
    return t;
}

template <class F>
MomentTable<F> push_moments(const WalkSpec& w, const Transform<F>& t, int order) {
    if (order < 2) throw Error("domain-error", "moment order must be at least 2");
    MomentTable<F> out;
    out.order = order;
    std::vector<std::pair<F, F>> xs;
    std::vector<F> ps;
    for (const auto& a : w.atoms) {
        xs.push_back(t.apply(a.dy1, a.dy2));
        ps.push_back(from_rational<F>(a.p));
    }
    for (int s = 0; s <= order; ++s)
        for (int k = 0; k <= s; ++k) {
            F acc = from_int<F>(0);
            for (std::size_t i = 0; i < xs.size(); ++i)
                acc = acc + ps[i] * power(xs[i].first, k) * power(xs[i].second, s - k);
            out.set(k, s - k, acc);
        }
    // the normalization holds exactly; pin it so float round-off does not leak in
    if constexpr (!is_exact_v<F>) {
        out.set(0, 0, from_int<F>(1));
        out.set(1, 0, from_int<F>(0));
        out.set(0, 1, from_int<F>(0));
        out.set(1, 1, from_int<F>(0));
        out.set(2, 0, from_int<F>(1));
        out.set(0, 2, from_int<F>(1));
    }
    return out;
}

template <class F>
MomentTable<F> push_moments(const WalkSpec& w, int order) {
    return push_moments(w, build_transform<F>(w), order);
}

inline Atom atom(int dy1, int dy2, const char* p) { return Atom{dy1, dy2, parse_rational(p)}; }

/// Built-in example walks; all satisfy the no-overshoot condition.
inline std::vector<WalkSpec> builtin_walks() {
    return {
        {"simple", {atom(1, 0, "1/4"), atom(-1, 0, "1/4"), atom(0, 1, "1/4"), atom(0, -1, "1/4")}},
        {"diagonal", {atom(1, 1, "1/8"), atom(-1, -1, "1/8"), atom(1, -1, "3/8"), atom(-1, 1, "3/8")}},
        {"m3-asym", {atom(-1, 0, "1/2"), atom(0, 1, "1/6"), atom(1, 0, "1/6"), atom(2, -1, "1/6")}},
        {"m4-sym", {atom(0, 1, "1/4"), atom(0, -1, "1/4"), atom(1, -1, "1/4"), atom(-1, 1, "1/4")}},
        {"m4-asym", {atom(-1, -1, "1/6"), atom(-1, 1, "1/2"), atom(2, -1, "1/3")}},
        {"m6-sym", {atom(0, 1, "1/8"), atom(0, -1, "1/8"), atom(1, -1, "3/8"), atom(-1, 1, "3/8")}},
        {"tandem", {atom(1, 0, "1/3"), atom(-1, 1, "1/3"), atom(0, -1, "1/3")}},
    };
}

inline WalkSpec builtin_walk(const std::string& name) {
    for (auto& w : builtin_walks())
        if (w.name == name) return w;
    if (name == "kreweras") return {"kreweras", {atom(-1, 0, "1/3"), atom(0, -1, "1/3"), atom(1, 1, "1/3")}};
    if (name == "trap") return {"trap", {atom(-1, 2, "1/3"), atom(2, -1, "1/3"), atom(-1, -1, "1/3")}};
    throw Error("unknown-walk", "no built-in walk named '" + name + "'");
}

/// Radicand needed to represent T exactly: 0 for rational, d for Q(sqrt d), -1 if neither.
inline std::int64_t transform_field(const WalkSpec& w) {
    w.validate();
    const Rational v1 = w.var1(), v2 = w.var2(), c = w.cov();
    const Rational det = v1 * v2 - c * c;
    std::int64_t d = 0;
    for (const Rational& r : {Rational(v2 / det), Rational(v2 * det), v2}) {
        auto q = field_traits<Quadratic>::sqrt_rational(r);
        if (!q) return -1;
        if (q->is_rational()) continue;
        if (d != 0 && d != q->radicand()) return -1;
        d = q->radicand();
    }
    return d;
}

}  // namespace conewalk

#endif  // CONEWALK_WALK_HPP
