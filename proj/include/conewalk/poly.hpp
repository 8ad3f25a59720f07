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

#ifndef CONEWALK_POLY_HPP
#define CONEWALK_POLY_HPP

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "conewalk/scalar.hpp"

namespace conewalk {

/// Converts between scalar backends along the embeddings
/// Rational -> Quadratic -> BigFloat -> double.
template <class To, class From>
To convert_scalar(const From& v) {
    if constexpr (std::is_same_v<To, From>) {
        return v;
    } else if constexpr (std::is_same_v<From, Rational>) {
        return from_rational<To>(v);
    } else if constexpr (std::is_same_v<To, BigFloat>) {
        return field_traits<From>::to_bigfloat(v);
    } else if constexpr (std::is_same_v<To, double>) {
        return field_traits<From>::to_double(v);
    } else if constexpr (std::is_same_v<To, Quadratic> && std::is_same_v<From, Rational>) {
        return Quadratic(v);
    } else {
        static_assert(std::is_same_v<To, From>, "no embedding between these scalar backends");
    }
}

/// Bivariate polynomial sum c_{ij} x1^i x2^j, stored sparsely by exponent pair.
/// Exact zeros are never stored; the zero polynomial has degree -1.
template <class F>
class Poly {
   public:
    using Scalar = F;
    using Exponent = std::pair<int, int>;
    using Terms = std::map<Exponent, F>;

    Poly() = default;

    static Poly constant(const F& c) {
        Poly p;
        p.add_term(0, 0, c);
        return p;
    }
    static Poly monomial(int i, int j, const F& c) {
        Poly p;
        p.add_term(i, j, c);
        return p;
    }
    static Poly monomial(int i, int j) { return monomial(i, j, from_int<F>(1)); }
    static Poly x1() { return monomial(1, 0); }
    static Poly x2() { return monomial(0, 1); }

    /// Homogeneous polynomial sum_i a[i] x1^{d-i} x2^i.
    static Poly from_homogeneous(int d, std::span<const F> a) {
        Poly p;
        for (int i = 0; i <= d && i < static_cast<int>(a.size()); ++i) p.add_term(d - i, i, a[i]);
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    F coeff(int i, int j) const {
        const auto it = terms_.find({i, j});
        return it == terms_.end() ? from_int<F>(0) : it->second;
    }

    void add_term(int i, int j, const F& c) {
        if (i < 0 || j < 0) throw Error("domain-error", "negative exponent");
        if (field_traits<F>::is_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace({i, j}, c);
        if (!inserted) {
            it->second = it->second + c;
            if (field_traits<F>::is_zero(it->second)) terms_.erase(it);
        }
    }

    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
        return d;
    }

    Poly homogeneous_part(int d) const {
        Poly p;
        for (const auto& [e, c] : terms_)
            if (e.first + e.second == d) p.terms_.emplace(e, c);
        return p;
    }

    /// Coefficients a_{d,i} of x1^{d-i} x2^i for i = 0..d.
    std::vector<F> homogeneous_coeffs(int d) const {
        std::vector<F> a(static_cast<std::size_t>(std::max(d + 1, 0)), from_int<F>(0));
        for (int i = 0; i <= d; ++i) a[i] = coeff(d - i, i);
        return a;
    }

    F evaluate(const F& x, const F& y) const {
        F acc = from_int<F>(0);
        for (const auto& [e, c] : terms_) acc = acc + c * power(x, e.first) * power(y, e.second);
        return acc;
    }

    /// Evaluation after embedding the coefficients into another backend.
    template <class G>
    G evaluate_as(const G& x, const G& y) const {
        G acc = from_int<G>(0);
        for (const auto& [e, c] : terms_) acc = acc + convert_scalar<G>(c) * power(x, e.first) * power(y, e.second);
        return acc;
    }

    Poly operator-() const {
        Poly p;
        for (const auto& [e, c] : terms_) p.terms_.emplace(e, -c);
        return p;
    }
    Poly& operator+=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, -c);
        return *this;
    }
    Poly& operator*=(const F& s) {
        if (field_traits<F>::is_zero(s)) {
            terms_.clear();
            return *this;
        }
        Terms out;
        for (const auto& [e, c] : terms_) {
            F v = c * s;
            if (!field_traits<F>::is_zero(v)) out.emplace(e, std::move(v));
        }
        terms_ = std::move(out);
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const F& s) { return a *= s; }
    friend Poly operator*(const F& s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly p;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) p.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
        return p;
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

   private:
    Terms terms_;
};

template <class F>
std::ostream& operator<<(std::ostream& os, const Poly<F>& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        if (!first) os << " + ";
        first = false;
        os << "(" << scalar_to_string(c) << ")";
        if (e.first) os << "*x1^" << e.first;
        if (e.second) os << "*x2^" << e.second;
    }
    return os;
}

template <class To, class From>
Poly<To> poly_cast(const Poly<From>& p) {
    if constexpr (std::is_same_v<To, From>) {
        return p;
    } else {
        Poly<To> out;
        for (const auto& [e, c] : p.terms()) out.add_term(e.first, e.second, convert_scalar<To>(c));
        return out;
    }
}

template <class F>
Poly<F> power(const Poly<F>& p, int e) {
    Poly<F> r = Poly<F>::constant(from_int<F>(1));
    for (int i = 0; i < e; ++i) r = r * p;
    return r;
}

/// d^{k+l} f / dx1^k dx2^l by repeated formal differentiation.
template <class F>
Poly<F> derivative(const Poly<F>& f, int k, int l) {
    Poly<F> out;
    for (const auto& [e, c] : f.terms()) {
        const auto [i, j] = e;
        if (i < k || j < l) continue;
        F v = c;
        for (int t = 0; t < k; ++t) v = v * from_int<F>(i - t);
        for (int t = 0; t < l; ++t) v = v * from_int<F>(j - t);
        out.add_term(i - k, j - l, v);
    }
    return out;
}

/// Full Laplacian d^2/dx1^2 + d^2/dx2^2.
template <class F>
Poly<F> laplacian(const Poly<F>& f) {
    return derivative(f, 2, 0) + derivative(f, 0, 2);
}

namespace fault {
/// Test hook: when set, u_poly returns a corrupted table (x1^{m-1} x2 coefficient off by one).
inline std::atomic<bool>& corrupt_u_poly() {
    static std::atomic<bool> flag{false};
    return flag;
}
}  // namespace fault

/// Im (x1 + i x2)^m = sum_k (-1)^k C(m, 2k+1) x1^{m-2k-1} x2^{2k+1}.
template <class F>
Poly<F> u_poly(int m) {
    if (m < 1) throw Error("domain-error", "u_poly requires m >= 1");
    Poly<F> p;
    for (int k = 0; 2 * k + 1 <= m; ++k) {
        Integer c = binomial(m, 2 * k + 1);
        if (k % 2) c = -c;
        p.add_term(m - 2 * k - 1, 2 * k + 1, from_rational<F>(Rational(c)));
    }
    if (fault::corrupt_u_poly().load(std::memory_order_relaxed) && m >= 2) p.add_term(m - 1, 1, from_int<F>(1));
    return p;
}

/// Re (x1 + i x2)^m.
template <class F>
Poly<F> re_poly(int m) {
    if (m < 0) throw Error("domain-error", "re_poly requires m >= 0");
    Poly<F> p;
    for (int k = 0; 2 * k <= m; ++k) {
        Integer c = binomial(m, 2 * k);
        if (k % 2) c = -c;
        p.add_term(m - 2 * k, 2 * k, from_rational<F>(Rational(c)));
    }
    return p;
}

/// f(a11 y1 + a12 y2, a21 y1 + a22 y2) as a polynomial in (y1, y2).
template <class F>
Poly<F> substitute_linear(const Poly<F>& f, const F& a11, const F& a12, const F& a21, const F& a22) {
    const Poly<F> first = Poly<F>::monomial(1, 0, a11) + Poly<F>::monomial(0, 1, a12);
    const Poly<F> second = Poly<F>::monomial(1, 0, a21) + Poly<F>::monomial(0, 1, a22);
    const int d = std::max(f.degree(), 0);
    std::vector<Poly<F>> p1(d + 1), p2(d + 1);
    p1[0] = p2[0] = Poly<F>::constant(from_int<F>(1));
    for (int i = 1; i <= d; ++i) {
        p1[i] = p1[i - 1] * first;
        p2[i] = p2[i - 1] * second;
    }
    Poly<F> out;
    for (const auto& [e, c] : f.terms()) out += (p1[e.first] * p2[e.second]) * c;
    return out;
}

/// Largest coefficient magnitude (0 for the zero polynomial).
template <class F>
BigFloat max_abs_coeff(const Poly<F>& f) {
    BigFloat m = 0;
    for (const auto& [e, c] : f.terms()) m = std::max(m, magnitude(c));
    return m;
}

/// True when every coefficient is negligible relative to `scale`.
template <class F>
bool negligible(const Poly<F>& f, const BigFloat& scale = BigFloat(1)) {
    for (const auto& [e, c] : f.terms())
        if (!negligible(c, scale)) return false;
    return true;
}

/// Coefficients (by power of t) of f(t, b t), or f(0, t) when b is absent
/// (the vertical ray x1 = 0).
template <class F>
std::vector<F> restrict_to_ray(const Poly<F>& f, const std::optional<F>& b) {
    const int d = std::max(f.degree(), 0);
    std::vector<F> out(d + 1, from_int<F>(0));
    for (const auto& [e, c] : f.terms()) {
        const int deg = e.first + e.second;
        if (b) {
            out[deg] = out[deg] + c * power(*b, e.second);
        } else if (e.first == 0) {
            out[deg] = out[deg] + c;
        }
    }
    return out;
}

/// Coefficients (by power of t) of f(c t, s t).
template <class F>
std::vector<F> restrict_to_direction(const Poly<F>& f, const F& c, const F& s) {
    const int d = std::max(f.degree(), 0);
    std::vector<F> out(d + 1, from_int<F>(0));
    for (const auto& [e, v] : f.terms()) out[e.first + e.second] = out[e.first + e.second] + v * power(c, e.first) * power(s, e.second);
    return out;
}

template <class F>
bool vanishes_on_direction(const Poly<F>& f, const F& c, const F& s, const BigFloat& scale = BigFloat(1)) {
    for (const auto& v : restrict_to_direction(f, c, s))
        if (!negligible(v, scale)) return false;
    return true;
}

template <class F>
bool vanishes_on_ray(const Poly<F>& f, const std::optional<F>& b, const BigFloat& scale = BigFloat(1)) {
    for (const auto& c : restrict_to_ray(f, b))
        if (!negligible(c, scale)) return false;
    return true;
}

template <class F>
struct Division {
    Poly<F> quotient;
    Poly<F> remainder;
};

/// Divides f by the linear form alpha x1 + beta x2 (beta != 0), degree by
/// degree; the remainder only contains pure powers of x1.
template <class F>
Division<F> divide_by_linear(const Poly<F>& f, const F& alpha, const F& beta) {
    if (field_traits<F>::is_zero(beta)) throw Error("domain-error", "divide_by_linear requires a non-zero x2 coefficient");
    Division<F> out;
    for (int d = 0; d <= f.degree(); ++d) {
        std::vector<F> a = f.homogeneous_coeffs(d);  // a[i] multiplies x1^{d-i} x2^i
        if (d == 0) {
            out.remainder.add_term(0, 0, a[0]);
            continue;
        }
        // synthetic division in s = x2/x1 from the top power down
        std::vector<F> q(d, from_int<F>(0));
        for (int i = d; i >= 1; --i) {
            q[i - 1] = a[i] / beta;
            a[i - 1] = a[i - 1] - q[i - 1] * alpha;
        }
        for (int i = 0; i < d; ++i) out.quotient.add_term(d - 1 - i, i, q[i]);
        out.remainder.add_term(d, 0, a[0]);
    }
    return out;
}

}  // namespace conewalk

#endif  // CONEWALK_POLY_HPP
