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

#ifndef CONEWALK_JSON_IO_HPP
#define CONEWALK_JSON_IO_HPP

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "conewalk/laplace_system.hpp"
#include "conewalk/simulator.hpp"

namespace conewalk {

using json = nlohmann::json;

/// Input error carrying its location.
class InputError : public Error {
   public:
    InputError(std::string file, int line, std::string field, const std::string& message)
        : Error("parse-error", message), file_(std::move(file)), line_(line), field_(std::move(field)) {}
    const std::string& file() const { return file_; }
    int line() const { return line_; }
    const std::string& field() const { return field_; }

   private:
    std::string file_;
    int line_;
    std::string field_;
};

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

struct Backend {
    enum class Kind { automatic, rational, quadratic, floating };
    Kind kind = Kind::automatic;
    std::int64_t d = 0;
    unsigned bits = 256;

    std::string str() const {
        switch (kind) {
            case Kind::automatic:
                return "auto";
            case Kind::rational:
                return "rational";
            case Kind::quadratic:
                return "quad:" + std::to_string(d);
            default:
                return "float:" + std::to_string(bits);
        }
    }
};

inline Backend parse_backend(const std::string& s) {
    Backend b;
    if (s == "auto") return b;
    if (s == "rational") {
        b.kind = Backend::Kind::rational;
        return b;
    }
    auto number_after = [&](std::size_t pos) -> long long {
        const std::string tail = s.substr(pos);
        if (!detail::is_integer_literal(tail) || tail.front() == '-' || tail.front() == '+')
            throw Error("invalid-backend", "bad backend '" + s + "'");
        return std::stoll(tail);
    };
    if (s.rfind("quad:", 0) == 0) {
        b.kind = Backend::Kind::quadratic;
        b.d = number_after(5);
        if (b.d < 2 || square_free_part(b.d) != b.d)
            throw Error("invalid-backend", "quad:d needs a square-free d >= 2");
        return b;
    }
    if (s.rfind("float:", 0) == 0) {
        b.kind = Backend::Kind::floating;
        const long long bits = number_after(6);
        if (bits < 24 || bits > 1 << 20) throw Error("invalid-backend", "float precision must be in [24, 2^20] bits");
        b.bits = static_cast<unsigned>(bits);
        return b;
    }
    throw Error("invalid-backend", "unknown backend '" + s + "' (auto, rational, quad:d, float:bits)");
}

/// Default backend for the cone K_{pi/m}.
inline Backend auto_backend_for_m(int m) {
    Backend b;
    if (m == 1 || m == 2 || m == 4) {
        b.kind = Backend::Kind::rational;
    } else if (m == 3 || m == 6 || m == 12) {
        b.kind = Backend::Kind::quadratic;
        b.d = 3;
    } else if (m == 8) {
        b.kind = Backend::Kind::quadratic;
        b.d = 2;
    } else {
        b.kind = Backend::Kind::floating;
    }
    return b;
}

/// Smallest backend holding the walk's transform exactly.
inline Backend auto_backend_for_walk(const WalkSpec& w) {
    Backend b;
    const auto d = transform_field(w);
    if (d == 0) {
        b.kind = Backend::Kind::rational;
    } else if (d > 0) {
        b.kind = Backend::Kind::quadratic;
        b.d = d;
    } else {
        b.kind = Backend::Kind::floating;
    }
    return b;
}

template <class T>
struct type_tag {
    using type = T;
};

/// Calls fn(type_tag<F>{}) for the backend's scalar type (with the float precision in scope).
template <class Fn>
decltype(auto) dispatch(const Backend& b, Fn&& fn) {
    switch (b.kind) {
        case Backend::Kind::rational:
            return fn(type_tag<Rational>{});
        case Backend::Kind::quadratic:
            return fn(type_tag<Quadratic>{});
        case Backend::Kind::floating: {
            PrecisionScope scope(b.bits);
            return fn(type_tag<BigFloat>{});
        }
        default:
            throw Error("invalid-backend", "backend must be resolved before dispatch");
    }
}

/// Throws if a quadratic value lies outside Q(sqrt d).
inline void check_in_field(const Quadratic& v, std::int64_t d) {
    if (!v.is_rational() && v.radicand() != d)
        throw Error("field-mismatch", "value " + v.str() + " is not in Q(sqrt " + std::to_string(d) + ")");
}

// ---------------------------------------------------------------------------
// Text helpers
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path, 0, "", "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {
inline int line_of_offset(const std::string& text, std::size_t offset) {
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline std::size_t skip_ws(const std::string& t, std::size_t p) {
    while (p < t.size() && std::isspace(static_cast<unsigned char>(t[p]))) ++p;
    return p;
}

/// Offset just past the JSON string starting at p (t[p] == '"').
inline std::size_t skip_string(const std::string& t, std::size_t p) {
    for (++p; p < t.size(); ++p) {
        if (t[p] == '\\') ++p;
        else if (t[p] == '"') return p + 1;
    }
    return t.size();
}

/// Offset just past the JSON value starting at p.
inline std::size_t skip_value(const std::string& t, std::size_t p) {
    p = skip_ws(t, p);
    if (p >= t.size()) return p;
    if (t[p] == '"') return skip_string(t, p);
    if (t[p] == '{' || t[p] == '[') {
        int depth = 0;
        while (p < t.size()) {
            const char c = t[p];
            if (c == '"') {
                p = skip_string(t, p);
                continue;
            }
            if (c == '{' || c == '[') ++depth;
            if (c == '}' || c == ']') {
                if (--depth == 0) return p + 1;
            }
            ++p;
        }
        return p;
    }
    while (p < t.size() && t[p] != ',' && t[p] != '}' && t[p] != ']' && !std::isspace(static_cast<unsigned char>(t[p]))) ++p;
    return p;
}

/// Offset of the value named by a path such as "mu[3].v"; stops at the deepest
/// component that exists, so a missing field points at its enclosing object.
inline std::size_t offset_of_path(const std::string& t, const std::string& path) {
    std::size_t pos = skip_ws(t, 0);
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '.') {
            ++i;
            continue;
        }
        if (path[i] == '[') {
            const auto close = path.find(']', i);
            if (close == std::string::npos) break;
            const long idx = std::strtol(path.c_str() + i + 1, nullptr, 10);
            if (pos >= t.size() || t[pos] != '[') break;
            std::size_t q = skip_ws(t, pos + 1);
            for (long k = 0; k < idx && q < t.size() && t[q] != ']'; ++k) {
                q = skip_ws(t, skip_value(t, q));
                if (q < t.size() && t[q] == ',') q = skip_ws(t, q + 1);
            }
            if (q >= t.size() || t[q] == ']') break;
            pos = q;
            i = close + 1;
            continue;
        }
        auto end = path.find_first_of(".[", i);
        if (end == std::string::npos) end = path.size();
        const std::string key = path.substr(i, end - i);
        if (pos >= t.size() || t[pos] != '{') break;
        std::size_t q = skip_ws(t, pos + 1);
        bool found = false;
        while (q < t.size() && t[q] == '"') {
            const std::size_t kend = skip_string(t, q);
            const std::string name = t.substr(q + 1, kend - q - 2);
            q = skip_ws(t, kend);
            if (q < t.size() && t[q] == ':') q = skip_ws(t, q + 1);
            if (name == key) {
                found = true;
                break;
            }
            q = skip_ws(t, skip_value(t, q));
            if (q < t.size() && t[q] == ',') q = skip_ws(t, q + 1);
        }
        if (!found) break;
        pos = q;
        i = end;
    }
    return std::min(pos, t.size());
}

}  // namespace detail

/// Parses JSON text, turning syntax errors into located InputErrors.
inline json parse_json_text(const std::string& text, const std::string& file) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(file, detail::line_of_offset(text, e.byte ? e.byte - 1 : 0), "", e.what());
    }
}

/// Context for reporting field errors in a parsed document.
struct JsonSource {
    std::string file = "<memory>";
    std::string text;

    [[noreturn]] void fail(const std::string& field, const std::string& message) const {
        throw InputError(file, detail::line_of_offset(text, detail::offset_of_path(text, field)), field, message);
    }
};

namespace detail {
inline const json& require(const json& j, const char* key, const std::string& path, const JsonSource& src) {
    if (!j.is_object()) src.fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) src.fail(path.empty() ? key : path + "." + key, std::string("missing field '") + key + "'");
    return *it;
}

inline int require_int(const json& j, const char* key, const std::string& path, const JsonSource& src) {
    const json& v = require(j, key, path, src);
    if (!v.is_number_integer()) src.fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

inline std::string require_string(const json& j, const char* key, const std::string& path, const JsonSource& src) {
    const json& v = require(j, key, path, src);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    src.fail(path + "." + key, "expected a string");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

template <class F>
F scalar_from_string(const std::string& s, const Backend& b) {
    F v = parse_scalar<F>(s);
    if constexpr (std::is_same_v<F, Quadratic>) {
        if (b.kind == Backend::Kind::quadratic) check_in_field(v, b.d);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

template <class F>
json to_json(const Poly<F>& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"i", e.first}, {"j", e.second}, {"c", scalar_to_string(c)}});
    return json{{"terms", terms}};
}

template <class F>
Poly<F> poly_from_json(const json& j, const Backend& b = {}, const JsonSource& src = {}) {
    const json& terms = detail::require(j, "terms", "", src);
    if (!terms.is_array()) src.fail("terms", "expected an array");
    Poly<F> p;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string path = "terms[" + std::to_string(t) + "]";
        const int i = detail::require_int(terms[t], "i", path, src);
        const int jj = detail::require_int(terms[t], "j", path, src);
        if (i < 0 || jj < 0) src.fail(path, "exponents must be non-negative");
        try {
            p.add_term(i, jj, scalar_from_string<F>(detail::require_string(terms[t], "c", path, src), b));
        } catch (const InputError&) {
            throw;
        } catch (const Error& e) {
            src.fail(path + ".c", e.message());
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Moment tables and walks
// ---------------------------------------------------------------------------

template <class F>
json to_json(const MomentTable<F>& t) {
    json mu = json::array();
    for (const auto& [kl, v] : t.mu) mu.push_back({{"k", kl.first}, {"l", kl.second}, {"v", scalar_to_string(v)}});
    return json{{"order", t.order}, {"mu", mu}};
}

template <class F>
MomentTable<F> moments_from_json(const json& j, const Backend& b = {}, const JsonSource& src = {}) {
    MomentTable<F> t;
    t.order = detail::require_int(j, "order", "", src);
    const json& mu = detail::require(j, "mu", "", src);
    if (!mu.is_array()) src.fail("mu", "expected an array");
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const std::string path = "mu[" + std::to_string(i) + "]";
        const int k = detail::require_int(mu[i], "k", path, src);
        const int l = detail::require_int(mu[i], "l", path, src);
        if (k < 0 || l < 0 || k + l > t.order) src.fail(path, "moment index outside the table order");
        try {
            t.set(k, l, scalar_from_string<F>(detail::require_string(mu[i], "v", path, src), b));
        } catch (const InputError&) {
            throw;
        } catch (const Error& e) {
            src.fail(path + ".v", e.message());
        }
    }
    try {
        t.validate();
    } catch (const Error& e) {
        src.fail("mu", e.message());
    }
    return t;
}

inline json to_json(const WalkSpec& w) {
    json atoms = json::array();
    for (const auto& a : w.atoms) atoms.push_back({{"dy", {a.dy1, a.dy2}}, {"p", to_string(a.p)}});
    json out{{"atoms", atoms}};
    if (!w.name.empty()) out["name"] = w.name;
    return out;
}

inline WalkSpec walk_from_json(const json& j, const JsonSource& src = {}) {
    WalkSpec w;
    if (j.is_object() && j.contains("name") && j["name"].is_string()) w.name = j["name"].get<std::string>();
    const json& atoms = detail::require(j, "atoms", "", src);
    if (!atoms.is_array()) src.fail("atoms", "expected an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string path = "atoms[" + std::to_string(i) + "]";
        const json& dy = detail::require(atoms[i], "dy", path, src);
        if (!dy.is_array() || dy.size() != 2 || !dy[0].is_number_integer() || !dy[1].is_number_integer())
            src.fail(path + ".dy", "expected [int, int]");
        Atom a;
        a.dy1 = dy[0].get<int>();
        a.dy2 = dy[1].get<int>();
        try {
            a.p = parse_rational(detail::require_string(atoms[i], "p", path, src));
        } catch (const InputError&) {
            throw;
        } catch (const Error& e) {
            src.fail(path + ".p", e.message());
        }
        w.atoms.push_back(a);
    }
    try {
        w.validate();
    } catch (const Error& e) {
        src.fail("atoms", e.message());
    }
    return w;
}

inline WalkSpec load_walk(const std::string& path) {
    JsonSource src{path, read_text_file(path)};
    return walk_from_json(parse_json_text(src.text, path), src);
}

template <class F>
MomentTable<F> load_moments(const std::string& path, const Backend& b) {
    JsonSource src{path, read_text_file(path)};
    return moments_from_json<F>(parse_json_text(src.text, path), b, src);
}

// ---------------------------------------------------------------------------
// Matrices and reports
// ---------------------------------------------------------------------------

template <class F>
json to_json(const Matrix<F>& A) {
    json rows = json::array();
    for (const auto& r : A) {
        json row = json::array();
        for (const auto& v : r) row.push_back(scalar_to_string(v));
        rows.push_back(row);
    }
    return rows;
}

template <class F>
Matrix<F> matrix_from_json(const json& j, const Backend& b = {}) {
    Matrix<F> A;
    for (const auto& r : j) {
        std::vector<F> row;
        for (const auto& v : r) row.push_back(scalar_from_string<F>(v.get<std::string>(), b));
        A.push_back(row);
    }
    return A;
}

template <class F>
json to_json(const std::vector<F>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(scalar_to_string(x));
    return out;
}

/// Doubles as shortest round-trip strings (locale-free).
inline std::string double_string(double v) { return field_traits<double>::to_string(v); }

inline json to_json(const CheckResult& c) {
    json out{{"name", c.name},
             {"estimate", c.estimate},
             {"std_error", c.std_error},
             {"target", c.target},
             {"z", std::isfinite(c.z) ? json(c.z) : json(c.z > 0 ? "inf" : "-inf")},
             {"pass", c.pass}};
    if (c.name == "tau-mean") out["bracket"] = {c.bracket_low, c.bracket_high};
    if (c.name == "harmonicity") out["exact_discrepancy"] = c.exact_discrepancy;
    return out;
}

inline json to_json(const SimReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    json out{{"walk", r.walk},   {"start", {r.start1, r.start2}}, {"paths", r.paths},
             {"seed", r.seed},   {"max_steps", r.max_steps},      {"truncated", r.truncated},
             {"checks", checks}, {"pass", r.pass()}};
    if (r.tail) {
        json pts = json::array();
        for (const auto& [n, s] : r.tail->survivors) pts.push_back({n, s});
        out["tail"] = {{"slope", r.tail->slope},
                       {"slope_std_error", r.tail->slope_std_error},
                       {"target", r.tail->target},
                       {"survivors", pts},
                       {"pass", r.tail->pass}};
    }
    return out;
}

/// Canonical text: sorted keys (nlohmann objects are ordered maps), no locale.
inline std::string dump_canonical(const json& j, bool pretty) { return pretty ? j.dump(2) + "\n" : j.dump() + "\n"; }

}  // namespace conewalk

#endif  // CONEWALK_JSON_IO_HPP
