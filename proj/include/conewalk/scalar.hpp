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

#ifndef CONEWALK_SCALAR_HPP
#define CONEWALK_SCALAR_HPP

#include <cctype>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <locale>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "conewalk/error.hpp"

namespace conewalk {

namespace bmp = boost::multiprecision;

using Integer = bmp::number<bmp::gmp_int, bmp::et_off>;
using Rational = bmp::number<bmp::gmp_rational, bmp::et_off>;
using BigFloat = bmp::number<bmp::mpfr_float_backend<0>, bmp::et_off>;

// ---------------------------------------------------------------------------
// Big-float working precision.
//
// mpfr_float<0> keeps a process-wide default precision in decimal digits; we
// track the requested precision in bits so tolerances are stated in bits.
// ---------------------------------------------------------------------------

namespace detail {
inline unsigned& float_bits_storage() {
    static unsigned bits = 256;
    return bits;
}
inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}
}  // namespace detail

inline void set_float_precision(unsigned bits) {
    if (bits < 24) throw Error("invalid-precision", "big-float precision must be at least 24 bits");
    detail::float_bits_storage() = bits;
    BigFloat::default_precision(detail::digits10_for_bits(bits));
}

inline unsigned float_precision() { return detail::float_bits_storage(); }

namespace detail {
inline const bool precision_initialised = (set_float_precision(256), true);
}

/// Restores the previous big-float precision on scope exit.
class PrecisionScope {
   public:
    explicit PrecisionScope(unsigned bits) : saved_(float_precision()) { set_float_precision(bits); }
    ~PrecisionScope() { set_float_precision(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

   private:
    unsigned saved_;
};

inline BigFloat big_pi() {
    BigFloat pi;
    mpfr_const_pi(pi.backend().data(), MPFR_RNDN);
    return pi;
}

// ---------------------------------------------------------------------------
// Rational helpers
// ---------------------------------------------------------------------------

inline std::string to_string(const Rational& r) {
    const Integer num = bmp::numerator(r);
    const Integer den = bmp::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

namespace detail {
inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline bool is_integer_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
}

inline Integer parse_integer(std::string_view s) {
    if (!is_integer_literal(s)) throw Error("parse-error", "not an integer: '" + std::string(s) + "'");
    if (s.front() == '+') s.remove_prefix(1);
    // strip leading zeros: the string constructor reads "0..." as octal
    const bool neg = s.front() == '-';
    if (neg) s.remove_prefix(1);
    while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
    const Integer v(std::string{s});
    return neg ? Integer(-v) : v;
}
}  // namespace detail

/// Accepts "p", "p/q" and plain decimals such as "-0.125" (converted exactly).
inline Rational parse_rational(std::string_view text) {
    const std::string_view s = detail::trim(text);
    if (s.empty()) throw Error("parse-error", "empty rational literal");
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const Integer num = detail::parse_integer(detail::trim(s.substr(0, slash)));
        const Integer den = detail::parse_integer(detail::trim(s.substr(slash + 1)));
        if (den == 0) throw Error("parse-error", "zero denominator in '" + std::string(s) + "'");
        return Rational(num, den);
    }
    if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string digits(s.substr(0, dot));
        const std::string_view frac = s.substr(dot + 1);
        if (!frac.empty() && !detail::is_integer_literal(frac))
            throw Error("parse-error", "not a decimal: '" + std::string(s) + "'");
        if (frac.size() > 0 && (frac.front() == '-' || frac.front() == '+'))
            throw Error("parse-error", "not a decimal: '" + std::string(s) + "'");
        digits += frac;
        if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
        Integer den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        return Rational(detail::parse_integer(digits), den);
    }
    return Rational(detail::parse_integer(s));
}

/// Square-free part of a positive integer by trial division (inputs here are small).
inline std::int64_t square_free_part(std::int64_t n) {
    if (n <= 0) throw Error("domain-error", "square_free_part expects a positive integer");
    std::int64_t s = 1;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        while (n % (p * p) == 0) n /= p * p;
        if (n % p == 0) {
            s *= p;
            n /= p;
        }
    }
    return s * n;
}

// ---------------------------------------------------------------------------
// Quadratic field Q(sqrt d): p + q sqrt(d).
//
// d == 0 marks a plain rational, which mixes freely with any field. Mixing two
// different non-trivial d raises "field-mismatch".
// ---------------------------------------------------------------------------

class Quadratic {
   public:
    Quadratic() = default;
    Quadratic(int v) : p_(v) {}  // NOLINT(google-explicit-constructor)
    Quadratic(const Rational& p) : p_(p) {}  // NOLINT(google-explicit-constructor)
    Quadratic(const Rational& p, const Rational& q, std::int64_t d) : p_(p), q_(q), d_(d) {
        if (d_ < 0) throw Error("domain-error", "quadratic field requires d > 0");
        if (d_ == 0 && q_ != 0) throw Error("domain-error", "irrational part given without a radicand");
        if (d_ != 0 && square_free_part(d_) != d_)
            throw Error("domain-error", "quadratic field requires square-free d, got " + std::to_string(d_));
        if (d_ == 1) {
            p_ += q_;
            q_ = 0;
            d_ = 0;
        }
        normalise();
    }

    static Quadratic sqrt_of(std::int64_t d) { return Quadratic(0, 1, d); }

    const Rational& rational_part() const { return p_; }
    const Rational& irrational_part() const { return q_; }
    std::int64_t radicand() const { return d_; }
    bool is_rational() const { return q_ == 0; }

    Quadratic operator-() const { return Quadratic(-p_, -q_, d_, Raw{}); }

    Quadratic& operator+=(const Quadratic& o) {
        const auto d = merged(o);
        p_ += o.p_;
        q_ += o.q_;
        d_ = d;
        normalise();
        return *this;
    }
    Quadratic& operator-=(const Quadratic& o) {
        const auto d = merged(o);
        p_ -= o.p_;
        q_ -= o.q_;
        d_ = d;
        normalise();
        return *this;
    }
    Quadratic& operator*=(const Quadratic& o) {
        const auto d = merged(o);
        const Rational p = p_ * o.p_ + q_ * o.q_ * Rational(d);
        const Rational q = p_ * o.q_ + q_ * o.p_;
        p_ = p;
        q_ = q;
        d_ = d;
        normalise();
        return *this;
    }
    Quadratic& operator/=(const Quadratic& o) {
        if (o.is_zero()) throw Error("division-by-zero", "division by zero in quadratic field");
        const auto d = merged(o);
        const Rational norm = o.p_ * o.p_ - o.q_ * o.q_ * Rational(d);
        Quadratic conj(o.p_ / norm, -o.q_ / norm, d, Raw{});
        return *this *= conj;
    }

    friend Quadratic operator+(Quadratic a, const Quadratic& b) { return a += b; }
    friend Quadratic operator-(Quadratic a, const Quadratic& b) { return a -= b; }
    friend Quadratic operator*(Quadratic a, const Quadratic& b) { return a *= b; }
    friend Quadratic operator/(Quadratic a, const Quadratic& b) { return a /= b; }

    friend bool operator==(const Quadratic& a, const Quadratic& b) {
        return a.p_ == b.p_ && a.q_ == b.q_ && (a.q_ == 0 || a.d_ == b.d_);
    }
    friend bool operator!=(const Quadratic& a, const Quadratic& b) { return !(a == b); }

    bool is_zero() const { return p_ == 0 && q_ == 0; }

    /// Exact sign of p + q sqrt(d).
    int sign() const {
        const int sp = p_.sign();
        const int sq = q_.sign();
        if (sq == 0) return sp;
        if (sp == 0 || sp == sq) return sq;
        // opposite signs: compare p^2 with q^2 d
        const Rational lhs = p_ * p_;
        const Rational rhs = q_ * q_ * Rational(d_);
        if (lhs == rhs) return 0;
        return lhs > rhs ? sp : sq;
    }

    friend bool operator<(const Quadratic& a, const Quadratic& b) { return (a - b).sign() < 0; }
    friend bool operator>(const Quadratic& a, const Quadratic& b) { return (a - b).sign() > 0; }
    friend bool operator<=(const Quadratic& a, const Quadratic& b) { return (a - b).sign() <= 0; }
    friend bool operator>=(const Quadratic& a, const Quadratic& b) { return (a - b).sign() >= 0; }

    BigFloat to_bigfloat() const {
        BigFloat v(p_);
        if (q_ != 0) v += BigFloat(q_) * sqrt(BigFloat(d_));
        return v;
    }

    std::string str() const {
        if (q_ == 0) return to_string(p_);
        std::string out;
        if (p_ != 0) out = to_string(p_);
        const Rational aq = q_ < 0 ? Rational(-q_) : q_;
        if (q_ < 0)
            out += "-";
        else if (!out.empty())
            out += "+";
        if (aq != 1) out += to_string(aq) + "*";
        out += "sqrt(" + std::to_string(d_) + ")";
        return out;
    }

    /// Parses "p", "p/q", "r*sqrt(d)", "p+r*sqrt(d)", "p-r/s*sqrt(d)", "sqrt(d)".
    static Quadratic parse(std::string_view text) {
        const std::string_view s = detail::trim(text);
        const auto sq = s.find("sqrt(");
        if (sq == std::string_view::npos) return Quadratic(parse_rational(s));
        const auto close = s.find(')', sq);
        if (close == std::string_view::npos || detail::trim(s.substr(close + 1)).size() != 0)
            throw Error("parse-error", "malformed quadratic literal '" + std::string(s) + "'");
        const auto d = detail::parse_integer(detail::trim(s.substr(sq + 5, close - sq - 5)));
        const std::int64_t dv = d.convert_to<std::int64_t>();
        std::string_view head = s.substr(0, sq);
        if (!head.empty() && head.back() == '*') head.remove_suffix(1);
        head = detail::trim(head);
        // split head into rational part and coefficient of the root at the last sign
        std::size_t split = std::string_view::npos;
        for (std::size_t i = head.size(); i-- > 1;) {
            if ((head[i] == '+' || head[i] == '-') && head[i - 1] != 'e' && head[i - 1] != 'E') {
                split = i;
                break;
            }
        }
        Rational p = 0;
        std::string coeff;
        if (split == std::string_view::npos) {
            coeff = std::string(head);
        } else {
            p = parse_rational(head.substr(0, split));
            coeff = std::string(head.substr(split));
        }
        Rational q;
        if (coeff.empty() || coeff == "+")
            q = 1;
        else if (coeff == "-")
            q = -1;
        else
            q = parse_rational(coeff);
        return Quadratic(p, q, dv);
    }

   private:
    struct Raw {};
    Quadratic(Rational p, Rational q, std::int64_t d, Raw) : p_(std::move(p)), q_(std::move(q)), d_(d) { normalise(); }

    std::int64_t merged(const Quadratic& o) const {
        if (q_ == 0) return o.d_;
        if (o.q_ == 0) return d_;
        if (d_ != o.d_)
            throw Error("field-mismatch", "cannot combine elements of Q(sqrt " + std::to_string(d_) +
                                              ") and Q(sqrt " + std::to_string(o.d_) + ")");
        return d_;
    }
    void normalise() {
        if (q_ == 0) d_ = 0;
    }

    Rational p_ = 0;
    Rational q_ = 0;
    std::int64_t d_ = 0;
};

// ---------------------------------------------------------------------------
// field_traits: the uniform surface the algebra is written against.
// ---------------------------------------------------------------------------

template <class F>
struct field_traits;

template <>
struct field_traits<Rational> {
    static constexpr bool exact = true;
    static std::string name() { return "rational"; }
    static Rational from_rational(const Rational& r) { return r; }
    static bool is_zero(const Rational& v) { return v == 0; }
    static int sign(const Rational& v) { return v.sign(); }
    static BigFloat to_bigfloat(const Rational& v) { return BigFloat(v); }
    static double to_double(const Rational& v) { return v.convert_to<double>(); }
    static std::string to_string(const Rational& v) { return conewalk::to_string(v); }
    static Rational parse(std::string_view s) { return parse_rational(s); }
    static std::optional<Rational> sqrt_rational(const Rational& r) {
        if (r < 0) return std::nullopt;
        const Integer n = bmp::numerator(r);
        const Integer d = bmp::denominator(r);
        const Integer sn = bmp::sqrt(n);
        const Integer sd = bmp::sqrt(d);
        if (sn * sn != n || sd * sd != d) return std::nullopt;
        return Rational(sn, sd);
    }
    static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
};

template <>
struct field_traits<Quadratic> {
    static constexpr bool exact = true;
    static std::string name() { return "quadratic"; }
    static Quadratic from_rational(const Rational& r) { return Quadratic(r); }
    static bool is_zero(const Quadratic& v) { return v.is_zero(); }
    static int sign(const Quadratic& v) { return v.sign(); }
    static BigFloat to_bigfloat(const Quadratic& v) { return v.to_bigfloat(); }
    static double to_double(const Quadratic& v) { return v.to_bigfloat().convert_to<double>(); }
    static std::string to_string(const Quadratic& v) { return v.str(); }
    static Quadratic parse(std::string_view s) { return Quadratic::parse(s); }
    /// sqrt(r) as an element c or c*sqrt(s) with s the square-free part of r.
    static std::optional<Quadratic> sqrt_rational(const Rational& r) {
        if (r < 0) return std::nullopt;
        if (r == 0) return Quadratic(0);
        if (auto exact_root = field_traits<Rational>::sqrt_rational(r)) return Quadratic(*exact_root);
        const Integer n = bmp::numerator(r);
        const Integer d = bmp::denominator(r);
        const Integer nd = n * d;
        if (nd > Integer(std::numeric_limits<std::int64_t>::max())) return std::nullopt;
        const std::int64_t s = square_free_part(nd.convert_to<std::int64_t>());
        // r = (nd / s) / d^2 * s and nd / s is a perfect square
        const Rational scale = Rational(Integer(nd / s), d * d);
        auto root = field_traits<Rational>::sqrt_rational(scale);
        if (!root) return std::nullopt;
        return Quadratic(0, *root, s);
    }
    static Quadratic abs(const Quadratic& v) { return v.sign() < 0 ? -v : v; }
};

template <>
struct field_traits<BigFloat> {
    static constexpr bool exact = false;
    static std::string name() { return "float"; }
    static BigFloat from_rational(const Rational& r) { return BigFloat(r); }
    static bool is_zero(const BigFloat& v) { return v == 0; }
    static int sign(const BigFloat& v) { return v.sign(); }
    static BigFloat to_bigfloat(const BigFloat& v) { return v; }
    static double to_double(const BigFloat& v) { return v.convert_to<double>(); }
    static std::string to_string(const BigFloat& v) {
        if (v == 0) return "0";
        // shortest digit string that reads back to the same value (mpfr, locale-free)
        return v.str(0, std::ios_base::scientific);
    }
    static BigFloat parse(std::string_view text) {
        const std::string_view s = detail::trim(text);
        if (s.find('/') != std::string_view::npos) return BigFloat(parse_rational(s));
        try {
            return BigFloat(std::string(s));
        } catch (const std::exception&) {
            throw Error("parse-error", "not a number: '" + std::string(s) + "'");
        }
    }
    static std::optional<BigFloat> sqrt_rational(const Rational& r) {
        if (r < 0) return std::nullopt;
        return sqrt(BigFloat(r));
    }
    static BigFloat abs(const BigFloat& v) { return bmp::abs(v); }
    /// Relative zero tolerance: half the working precision.
    static BigFloat tolerance() { return ldexp(BigFloat(1), -static_cast<int>(float_precision() / 2)); }
};

template <>
struct field_traits<double> {
    static constexpr bool exact = false;
    static std::string name() { return "double"; }
    static double from_rational(const Rational& r) { return r.convert_to<double>(); }
    static bool is_zero(double v) { return v == 0.0; }
    static int sign(double v) { return (v > 0) - (v < 0); }
    static BigFloat to_bigfloat(double v) { return BigFloat(v); }
    static double to_double(double v) { return v; }
    static std::string to_string(double v) {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os << std::setprecision(17) << v;
        return os.str();
    }
    static double parse(std::string_view s) { return field_traits<BigFloat>::parse(s).convert_to<double>(); }
    static std::optional<double> sqrt_rational(const Rational& r) {
        if (r < 0) return std::nullopt;
        return std::sqrt(r.convert_to<double>());
    }
    static double abs(double v) { return std::fabs(v); }
    static double tolerance() { return std::ldexp(1.0, -26); }
};

template <class F>
concept ScalarField = requires(const F& a, const F& b) {
    { a + b } -> std::convertible_to<F>;
    { a - b } -> std::convertible_to<F>;
    { a * b } -> std::convertible_to<F>;
    { a / b } -> std::convertible_to<F>;
    { -a } -> std::convertible_to<F>;
    { field_traits<F>::exact } -> std::convertible_to<bool>;
};

template <class F>
inline constexpr bool is_exact_v = field_traits<F>::exact;

template <class F>
F from_int(long long v) {
    return field_traits<F>::from_rational(Rational(v));
}

template <class F>
F from_rational(const Rational& r) {
    return field_traits<F>::from_rational(r);
}

/// Magnitude as a big float, used for tolerance scaling in every backend.
template <class F>
BigFloat magnitude(const F& v) {
    return bmp::abs(field_traits<F>::to_bigfloat(v));
}

/// Zero test: exact equality for exact fields; |v| <= tol * scale otherwise.
template <class F>
bool negligible(const F& v, const BigFloat& scale = BigFloat(1)) {
    if constexpr (is_exact_v<F>) {
        return field_traits<F>::is_zero(v);
    } else {
        const BigFloat s = scale > 1 ? scale : BigFloat(1);
        return magnitude(v) <= field_traits<F>::to_bigfloat(field_traits<F>::tolerance()) * s;
    }
}

template <class F>
std::string scalar_to_string(const F& v) {
    return field_traits<F>::to_string(v);
}

template <class F>
F parse_scalar(std::string_view s) {
    return field_traits<F>::parse(s);
}

inline Integer binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    Integer r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline Integer factorial(long n) {
    Integer r = 1;
    for (long i = 2; i <= n; ++i) r *= i;
    return r;
}

template <class F>
F binomial_as(long n, long k) {
    return from_rational<F>(Rational(binomial(n, k)));
}

template <class F>
F power(const F& base, int e) {
    F r = from_int<F>(1);
    for (int i = 0; i < e; ++i) r = r * base;
    return r;
}

}  // namespace conewalk

#endif  // CONEWALK_SCALAR_HPP
