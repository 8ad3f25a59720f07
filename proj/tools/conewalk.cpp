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

// conewalk command-line tool.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "conewalk/alt_construction.hpp"
#include "conewalk/exit_moments.hpp"
#include "conewalk/json_io.hpp"
#include "conewalk/self_test.hpp"
#include "conewalk/simulator.hpp"

namespace {

using namespace conewalk;

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kCheckFailed = 3;

/// Raised when a command ran but one of its checks did not hold.
struct CheckFailure {
    json payload;
};

struct Common {
    std::string backend = "auto";
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--backend", c.backend, "auto, rational, quad:d or float:bits");
    cmd->add_option("--out", c.out, "write the result to this file instead of stdout");
    cmd->add_option("--format", c.format, "json (compact) or pretty (indented)")
        ->check(CLI::IsMember({"json", "pretty"}));
}

void emit(const json& j, const Common& c) {
    const std::string text = dump_canonical(j, c.format == "pretty");
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw Error("io-error", "cannot write '" + c.out + "'");
    f << text;
    spdlog::info("wrote {}", c.out);
}

void setup_logging() {
    auto logger = spdlog::stderr_logger_mt("conewalk");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CONE_LOG")) {
        const std::string v = env;
        if (v == "error" || v == "warn" || v == "info" || v == "debug")
            spdlog::set_level(spdlog::level::from_str(v));
        else
            spdlog::warn("ignoring CONE_LOG={} (use error, warn, info or debug)", v);
    }
}

/// Pair of scalars written as "a,b".
template <class F>
std::pair<F, F> parse_pair(const std::string& text, const Backend& b, const char* what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Error("invalid-argument", std::string(what) + " must be written as a,b");
    return {scalar_from_string<F>(text.substr(0, comma), b), scalar_from_string<F>(text.substr(comma + 1), b)};
}

std::pair<long, long> parse_int_pair(const std::string& text, const char* what) {
    const auto comma = text.find(',');
    const std::string a = text.substr(0, comma), c = comma == std::string::npos ? "" : text.substr(comma + 1);
    if (!detail::is_integer_literal(a) || !detail::is_integer_literal(c))
        throw Error("invalid-argument", std::string(what) + " must be two integers written as a,b");
    return {std::stol(a), std::stol(c)};
}

/// Walk from a JSON file, or a built-in walk by name when no such file exists.
WalkSpec resolve_walk(const std::string& arg) {
    if (std::filesystem::exists(arg)) return load_walk(arg);
    try {
        return builtin_walk(arg);
    } catch (const Error&) {
        throw InputError(arg, 0, "", "no such file and no built-in walk with this name");
    }
}

/// Radicand named in a literal such as "2+sqrt(3)", or 0.
std::int64_t radicand_in(const std::string& s) {
    const auto p = s.find("sqrt(");
    if (p == std::string::npos) return 0;
    const auto close = s.find(')', p);
    const std::string d = s.substr(p + 5, close == std::string::npos ? std::string::npos : close - p - 5);
    if (!detail::is_integer_literal(d)) throw Error("parse-error", "malformed radicand in '" + s + "'");
    return std::stoll(d);
}

Backend explicit_or(const Common& c, Backend fallback) {
    Backend b = parse_backend(c.backend);
    if (b.kind == Backend::Kind::automatic) return fallback;
    return b;
}

/// Angle in radians, written as a decimal or as "pi/q" or "p*pi/q".
BigFloat parse_angle(const std::string& text) {
    const auto pi = text.find("pi");
    if (pi == std::string::npos) return field_traits<BigFloat>::parse(text);
    Rational num = 1;
    std::string head = text.substr(0, pi);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (!head.empty()) num = parse_rational(head);
    Rational den = 1;
    std::string tail = text.substr(pi + 2);
    if (!tail.empty()) {
        if (tail.front() != '/') throw Error("parse-error", "malformed angle '" + text + "'");
        den = parse_rational(tail.substr(1));
    }
    return big_pi() * BigFloat(num / den);
}

template <class F>
ConeSpec<F> cone_for_m(int m, const Backend& b) {
    if constexpr (std::is_same_v<F, Quadratic>)
        if (m > 2) return make_cone_in_field(m, b.d);
    return make_cone<F>(m);
}

json cone_json_common(const BigFloat& p_alpha, bool integer_m, int m) {
    json j{{"p_alpha", field_traits<BigFloat>::to_string(p_alpha)}};
    if (integer_m) j["m"] = m;
    return j;
}

template <class F>
json cone_to_json(const ConeSpec<F>& c) {
    json j = cone_json_common(c.p_alpha, c.mode == ConeSpec<F>::Mode::integer_m, c.m);
    if (c.half_plane)
        j["b"] = "half-plane";
    else if (c.b)
        j["b"] = scalar_to_string(*c.b);
    else
        j["b"] = "vertical";
    return j;
}

// ---------------------------------------------------------------------------
// harmonic
// ---------------------------------------------------------------------------

struct HarmonicArgs {
    Common common;
    int m = 0;
    std::string walk;
    std::string moments;
    bool cross_check = false;
};

template <class F>
json run_harmonic(const HarmonicArgs& a, const Backend& b) {
    ConeSpec<F> cone;
    MomentTable<F> mu;
    if (!a.walk.empty()) {
        const WalkSpec w = resolve_walk(a.walk);
        const auto T = build_transform<F>(w);
        cone = T.cone;
        if (cone.mode != ConeSpec<F>::Mode::integer_m)
            throw Error("angle-not-integer", "the walk's opening angle is not pi/m");
        mu = a.moments.empty() ? push_moments(w, T, std::max(cone.m, 2)) : load_moments<F>(a.moments, b);
    } else {
        cone = cone_for_m<F>(a.m, b);
        if (!a.moments.empty())
            mu = load_moments<F>(a.moments, b);
        else if (a.m <= 2)
            mu = normalized_table<F>(2);
        else
            throw Error("missing-moments", "--moments is required for m > 2 without --walk");
    }
    spdlog::info("building h for {} in the {} backend", cone.describe(), b.str());
    const auto r = construct_harmonic(cone, mu, HarmonicOptions{a.cross_check});
    json out{{"command", "harmonic"},
             {"backend", b.str()},
             {"cone", cone_to_json(cone)},
             {"m", r.m},
             {"h", to_json(r.h)},
             {"correction", to_json(r.correction)},
             {"residual_ok", r.residual_ok},
             {"boundary_ok", r.boundary_ok}};
    if (!r.residual_ok || !r.boundary_ok) throw CheckFailure{out};
    return out;
}

// ---------------------------------------------------------------------------
// exit-moments
// ---------------------------------------------------------------------------

struct ExitArgs {
    Common common;
    int k = 1;
    int m = 0;
    std::string b;
    std::string alpha;
    std::string walk;
    std::string moments;
    std::string at;
    std::string start;
};

template <class F>
json run_exit_moments(const ExitArgs& a, const Backend& bk) {
    ConeSpec<F> cone;
    std::optional<MomentTable<F>> mu;
    std::optional<Transform<F>> T;
    const int order = std::max(2 * a.k, 2);
    if (!a.walk.empty()) {
        const WalkSpec w = resolve_walk(a.walk);
        T = build_transform<F>(w);
        cone = T->cone;
        mu = push_moments(w, *T, order);
    } else if (a.m > 0) {
        cone = cone_for_m<F>(a.m, bk);
    } else if (!a.b.empty()) {
        cone = make_cone_from_b(scalar_from_string<F>(a.b, bk));
    } else if (!a.alpha.empty()) {
        if constexpr (is_exact_v<F>)
            throw Error("angle-not-representable", "--alpha needs a float backend");
        else
            cone = make_cone_from_alpha<F>(parse_angle(a.alpha));
    } else {
        throw Error("invalid-argument", "give one of --m, --b, --alpha or --walk");
    }
    if (!a.moments.empty()) mu = load_moments<F>(a.moments, bk);
    if (!mu) {
        if (a.k > 1) throw Error("missing-moments", "k > 1 needs --moments or --walk");
        mu = normalized_table<F>(2);
    }
    TauMomentSolver<F> solver(cone, *mu);
    const auto r = solver.solve(a.k);
    const bool residual_ok = negligible(r.residual, r.scale);
    json out{{"command", "exit-moments"}, {"backend", bk.str()},       {"cone", cone_to_json(cone)},
             {"k", a.k},                  {"G", to_json(r.G)},         {"rhs", to_json(r.rhs)},
             {"residual_ok", residual_ok}};
    std::optional<std::pair<F, F>> x;
    if (!a.at.empty()) x = parse_pair<F>(a.at, bk, "--at");
    if (!a.start.empty()) {
        if (!T) throw Error("invalid-argument", "--start needs --walk; use --at for cone coordinates");
        const auto [y1, y2] = parse_int_pair(a.start, "--start");
        x = T->apply(y1, y2);
    }
    if (x) {
        out["at"] = {scalar_to_string(x->first), scalar_to_string(x->second)};
        out["value"] = scalar_to_string(r.G.evaluate(x->first, x->second));
        try {
            const auto ep = exit_position_moments(cone, x->first, x->second, true);
            out["exit_position"] = {{"mean", {scalar_to_string(ep.mean1), scalar_to_string(ep.mean2)}},
                                    {"second", {scalar_to_string(*ep.second1), scalar_to_string(*ep.second2)}}};
        } catch (const Error& e) {
            spdlog::info("exit-position moments skipped: {}", e.what());
        }
    }
    if (!residual_ok) throw CheckFailure{out};
    return out;
}

// ---------------------------------------------------------------------------
// matrix
// ---------------------------------------------------------------------------

struct MatrixArgs {
    Common common;
    int n = 0;
    std::string b;
    int m = 0;
    bool vertical = false;
};

template <class F>
json run_matrix(const MatrixArgs& a, const Backend& bk) {
    std::optional<F> b;
    if (!a.b.empty()) {
        b = scalar_from_string<F>(a.b, bk);
    } else if (a.m > 0) {
        const auto cone = cone_for_m<F>(a.m, bk);
        if (cone.half_plane) throw Error("domain-error", "m = 1 is the half-plane; use --b 0");
        b = cone.b;
    } else if (!a.vertical) {
        throw Error("invalid-argument", "give --b, --m or --vertical");
    }
    const auto M = build_matrix(a.n, b);
    json out{{"command", "matrix"}, {"backend", bk.str()}, {"n", a.n}, {"rows", to_json(M.rows)}};
    out["b"] = b ? scalar_to_string(*b) : std::string("vertical");
    const auto k = kernel_dimension(M);
    out["kernel_dimension"] = k.dimension;
    if (k.basis) out["kernel"] = to_json(*k.basis);
    if (b && a.n >= 2) {
        const auto tri = triangularize_odd(a.n, *b);
        out["triangularization"] = {{"n_odd", tri.n_odd}, {"lambda", to_json(tri.lambda)}, {"theta", scalar_to_string(tri.theta)}};
    }
    return out;
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

struct TransformArgs {
    Common common;
    std::string walk;
    int order = 4;
};

template <class F>
json run_transform(const TransformArgs& a, const Backend& bk) {
    const WalkSpec w = resolve_walk(a.walk);
    const auto T = build_transform<F>(w);
    const auto mu = push_moments(w, T, a.order);
    return json{{"command", "transform"},
                {"backend", bk.str()},
                {"walk", to_json(w)},
                {"rho_squared", to_string(w.rho_squared())},
                {"T", json::array({json::array({scalar_to_string(T.t00), scalar_to_string(T.t01)}),
                                   json::array({"0", scalar_to_string(T.t11)})})},
                {"alpha", field_traits<BigFloat>::to_string(T.alpha)},
                {"alpha_formula", field_traits<BigFloat>::to_string(T.alpha_formula)},
                {"cone", cone_to_json(T.cone)},
                {"no_overshoot", check_no_overshoot(w)},
                {"moments", to_json(mu)}};
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
    Common common;
    std::string walk;
    int points = 200;
    std::uint64_t seed = 1;
    int radius = 30;
};

template <class F>
json run_verify(const VerifyArgs& a, const Backend& bk) {
    const WalkSpec w = resolve_walk(a.walk);
    const auto T = build_transform<F>(w);
    if (T.cone.mode != ConeSpec<F>::Mode::integer_m) throw Error("angle-not-integer", "the walk's angle is not pi/m");
    const auto mu = push_moments(w, T, std::max(T.cone.m, 2));
    const auto r = construct_harmonic(T.cone, mu, HarmonicOptions{true});
    std::mt19937_64 rng(a.seed);
    std::uniform_int_distribution<long> u(1, a.radius);
    BigFloat worst = 0;
    int failures = 0;
    for (int i = 0; i < a.points; ++i) {
        const long y1 = u(rng), y2 = u(rng);
        const F d = verify_one_step(r.h, w, T, y1, y2);
        const auto [x1, x2] = T.apply(y1, y2);
        const BigFloat s = std::max(BigFloat(1), magnitude(r.h.evaluate(x1, x2))) * r.scale;
        worst = std::max(worst, magnitude(d));
        if (!negligible(d, s)) ++failures;
    }
    const bool no_overshoot = check_no_overshoot(w);
    json out{{"command", "verify"},
             {"backend", bk.str()},
             {"walk", w.name},
             {"m", r.m},
             {"h", to_json(r.h)},
             {"points", a.points},
             {"one_step_failures", failures},
             {"max_abs_discrepancy", field_traits<BigFloat>::to_string(worst)},
             {"residual_ok", r.residual_ok},
             {"boundary_ok", r.boundary_ok},
             {"no_overshoot", no_overshoot}};
    const bool pass = failures == 0 && r.residual_ok && r.boundary_ok;
    out["pass"] = pass;
    if (!pass) throw CheckFailure{out};
    return out;
}

// ---------------------------------------------------------------------------
// alt-eliminate
// ---------------------------------------------------------------------------

struct AltArgs {
    Common common;
    int j = -1;
    int k = -1;
    int m = 0;
    std::string moments;
};

template <class F>
json run_alt(const AltArgs& a, const Backend& bk) {
    const auto cone = cone_for_m<F>(a.m, bk);
    json out{{"command", "alt-eliminate"}, {"backend", bk.str()}, {"cone", cone_to_json(cone)}};
    if (a.j >= 0 && a.k >= 0) {
        const Poly<F> fp = poly_cast<F>(particular_solution(a.j, a.k));
        const auto corr = harmonic_correction(fp, cone, a.j + a.k);
        const Poly<F> full = fp + corr.g;
        out["j"] = a.j;
        out["k"] = a.k;
        out["particular"] = to_json(fp);
        out["correction"] = to_json(corr.g);
        out["a_hat"] = scalar_to_string(corr.a_hat);
        out["b_hat"] = scalar_to_string(corr.b_hat);
        out["eliminator"] = to_json(full);
        const bool ok = laplacian(full) == poly_cast<F>(Poly<Rational>::monomial(a.j, a.k)) ||
                        negligible(Poly<F>(laplacian(full) - poly_cast<F>(Poly<Rational>::monomial(a.j, a.k))),
                                   std::max(BigFloat(1), max_abs_coeff(full)));
        out["laplacian_ok"] = ok;
        out["boundary_ok"] = vanishes_on_boundary(full, cone, std::max(BigFloat(1), max_abs_coeff(full)));
    }
    if (!a.moments.empty()) {
        const auto mu = load_moments<F>(a.moments, bk);
        const auto h_alt = build_harmonic_alt(cone, mu);
        const auto ref = construct_harmonic(cone, mu);
        const bool agree = negligible(Poly<F>(h_alt - ref.h), ref.scale);
        out["h"] = to_json(h_alt);
        out["agrees_with_linear_solve"] = agree;
        if (!agree) throw CheckFailure{out};
    }
    if (!out.contains("eliminator") && !out.contains("h"))
        throw Error("invalid-argument", "give --j and --k, or --moments");
    if (out.contains("laplacian_ok") && !(out["laplacian_ok"].get<bool>() && out["boundary_ok"].get<bool>()))
        throw CheckFailure{out};
    return out;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimArgs {
    Common common;
    std::string walk;
    std::string start = "1,1";
    std::uint64_t paths = 100000;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 10'000'000;
    std::string check = "tau-mean";
    unsigned threads = 0;
};

json run_simulate(const SimArgs& a) {
    SimConfig cfg;
    cfg.walk = resolve_walk(a.walk);
    if (cfg.walk.name.empty()) cfg.walk.name = std::filesystem::path(a.walk).stem().string();
    std::tie(cfg.start1, cfg.start2) = parse_int_pair(a.start, "--start");
    cfg.paths = a.paths;
    cfg.seed = a.seed;
    cfg.max_steps = a.max_steps;
    cfg.threads = a.threads;
    cfg.checks.clear();
    std::stringstream ss(a.check);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) cfg.checks.insert(item);
    spdlog::info("simulating {} paths of '{}'", cfg.paths, cfg.walk.name);
    const auto rep = sample_exit(cfg);
    json out = to_json(rep);
    out["command"] = "simulate";
    if (rep.truncated > 0) spdlog::warn("{} paths reached max_steps", rep.truncated);
    if (!rep.pass()) throw CheckFailure{out};
    return out;
}

// ---------------------------------------------------------------------------
// self-test
// ---------------------------------------------------------------------------

struct SelfTestArgs {
    Common common;
    std::string inject;
};

json run_self_test_cmd(const SelfTestArgs& a) {
    const Backend b = parse_backend(a.common.backend);
    if (a.inject == "u-poly") fault::corrupt_u_poly().store(true);
    const bool exact = b.kind != Backend::Kind::floating;
    SelfTestReport rep;
    auto print = [](const PropertyResult& r) {
        std::cerr << (r.pass ? "PASS " : "FAIL ") << r.module << "/" << r.name;
        if (!r.detail.empty()) std::cerr << "  (" << r.detail << ")";
        std::cerr << "\n";
    };
    if (exact) {
        rep = run_self_test(true, print);
    } else {
        PrecisionScope scope(b.bits);
        rep = run_self_test(false, print);
    }
    json out = to_json(rep);
    out["command"] = "self-test";
    std::size_t failed = 0;
    for (const auto& p : rep.properties) failed += !p.pass;
    std::cerr << (failed ? "self-test FAILED: " : "self-test passed: ") << rep.properties.size() - failed << "/"
              << rep.properties.size() << " properties\n";
    if (!rep.pass()) throw CheckFailure{out};
    return out;
}

json error_json(const Error& e) {
    json err{{"kind", e.kind()}, {"message", e.message()}};
    if (const auto* ie = dynamic_cast<const InputError*>(&e)) {
        err["file"] = ie->file();
        err["line"] = ie->line();
        err["field"] = ie->field();
    }
    return json{{"error", err}};
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Discrete harmonic polynomials and exit times for lattice walks in wedges"};
    app.require_subcommand(1);

    HarmonicArgs ha;
    auto* harmonic = app.add_subcommand("harmonic", "harmonic polynomial h = u + r for alpha = pi/m");
    add_common(harmonic, ha.common);
    harmonic->add_option("--m", ha.m, "cone K_{pi/m}")->check(CLI::PositiveNumber);
    harmonic->add_option("--walk", ha.walk, "walk JSON file (or built-in name)");
    harmonic->add_option("--moments", ha.moments, "moment table JSON file");
    harmonic->add_flag("--cross-check", ha.cross_check, "also run the split solver and indexed right-hand side");

    ExitArgs ea;
    auto* exitm = app.add_subcommand("exit-moments", "exit-time moment polynomial G_k");
    add_common(exitm, ea.common);
    exitm->add_option("--k", ea.k, "moment order")->check(CLI::PositiveNumber);
    exitm->add_option("--m", ea.m, "cone K_{pi/m}")->check(CLI::PositiveNumber);
    exitm->add_option("--b", ea.b, "slope of the second ray");
    exitm->add_option("--alpha", ea.alpha, "opening angle (radians, or pi/q), float backends");
    exitm->add_option("--walk", ea.walk, "walk JSON file (or built-in name)");
    exitm->add_option("--moments", ea.moments, "moment table JSON file");
    exitm->add_option("--at", ea.at, "evaluation point x1,x2 in cone coordinates");
    exitm->add_option("--start", ea.start, "evaluation point y1,y2 in quadrant coordinates (with --walk)");

    MatrixArgs ma;
    auto* matrix = app.add_subcommand("matrix", "boundary-augmented Laplace matrix M_{n,b}");
    add_common(matrix, ma.common);
    matrix->add_option("--n", ma.n, "degree")->required()->check(CLI::Range(2, 200));
    matrix->add_option("--b", ma.b, "slope of the second ray");
    matrix->add_option("--m", ma.m, "use b = tan(pi/m)")->check(CLI::PositiveNumber);
    matrix->add_flag("--vertical", ma.vertical, "second ray along the x2-axis");

    TransformArgs ta;
    auto* transform = app.add_subcommand("transform", "quadrant transform, angle and pushed moments of a walk");
    add_common(transform, ta.common);
    transform->add_option("--walk", ta.walk, "walk JSON file (or built-in name)")->required();
    transform->add_option("--order", ta.order, "moment order")->check(CLI::Range(2, 40));

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "exact one-step check of h for a walk");
    add_common(verify, va.common);
    verify->add_option("--walk", va.walk, "walk JSON file (or built-in name)")->required();
    verify->add_option("--points", va.points, "random interior lattice points")->check(CLI::PositiveNumber);
    verify->add_option("--seed", va.seed, "seed for the points");
    verify->add_option("--radius", va.radius, "points are drawn from [1, radius]^2")->check(CLI::PositiveNumber);

    SimArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo checks against the exact targets");
    add_common(simulate, sa.common);
    simulate->add_option("--walk", sa.walk, "walk JSON file (or built-in name)")->required();
    simulate->add_option("--start", sa.start, "start y1,y2 in quadrant coordinates");
    simulate->add_option("--paths", sa.paths, "number of paths")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sa.seed, "64-bit seed");
    simulate->add_option("--max-steps", sa.max_steps, "step cap per path")->check(CLI::PositiveNumber);
    simulate->add_option("--check", sa.check, "comma list of tau-mean, tau-second, exit-position, harmonicity, tail");
    simulate->add_option("--threads", sa.threads, "worker threads (0: all cores)");

    AltArgs aa;
    auto* alt = app.add_subcommand("alt-eliminate", "eliminators F_{j,k} and the alternative construction");
    add_common(alt, aa.common);
    alt->add_option("--m", aa.m, "cone K_{pi/m}")->required()->check(CLI::PositiveNumber);
    alt->add_option("--j", aa.j, "x1 exponent")->check(CLI::NonNegativeNumber);
    alt->add_option("--k", aa.k, "x2 exponent")->check(CLI::NonNegativeNumber);
    alt->add_option("--moments", aa.moments, "moment table: build h by eliminators and compare");

    SelfTestArgs sta;
    auto* selftest_cmd = app.add_subcommand("self-test", "property suite over all modules");
    add_common(selftest_cmd, sta.common);
    selftest_cmd->add_option("--inject-fault", sta.inject, "corrupt a table to check that the suite notices")
        ->check(CLI::IsMember({"u-poly"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return kInvalid;
    }

    const Common* common = nullptr;
    try {
        json out;
        if (harmonic->parsed()) {
            common = &ha.common;
            if ((ha.m > 0) == !ha.walk.empty()) throw Error("invalid-argument", "give exactly one of --m and --walk");
            const Backend b = explicit_or(ha.common, ha.walk.empty() ? auto_backend_for_m(ha.m)
                                                                     : auto_backend_for_walk(resolve_walk(ha.walk)));
            out = dispatch(b, [&](auto tag) { return run_harmonic<typename decltype(tag)::type>(ha, b); });
        } else if (exitm->parsed()) {
            common = &ea.common;
            Backend fallback;
            if (!ea.walk.empty())
                fallback = auto_backend_for_walk(resolve_walk(ea.walk));
            else if (ea.m > 0)
                fallback = auto_backend_for_m(ea.m);
            else if (!ea.b.empty())
                fallback = radicand_in(ea.b) ? parse_backend("quad:" + std::to_string(radicand_in(ea.b)))
                                             : parse_backend("rational");
            else
                fallback = parse_backend("float:256");
            const Backend b = explicit_or(ea.common, fallback);
            out = dispatch(b, [&](auto tag) { return run_exit_moments<typename decltype(tag)::type>(ea, b); });
        } else if (matrix->parsed()) {
            common = &ma.common;
            Backend fallback = parse_backend("rational");
            if (!ma.b.empty() && radicand_in(ma.b)) fallback = parse_backend("quad:" + std::to_string(radicand_in(ma.b)));
            if (ma.b.empty() && ma.m > 0) fallback = auto_backend_for_m(ma.m);
            const Backend b = explicit_or(ma.common, fallback);
            out = dispatch(b, [&](auto tag) { return run_matrix<typename decltype(tag)::type>(ma, b); });
        } else if (transform->parsed()) {
            common = &ta.common;
            const Backend b = explicit_or(ta.common, auto_backend_for_walk(resolve_walk(ta.walk)));
            out = dispatch(b, [&](auto tag) { return run_transform<typename decltype(tag)::type>(ta, b); });
        } else if (verify->parsed()) {
            common = &va.common;
            const Backend b = explicit_or(va.common, auto_backend_for_walk(resolve_walk(va.walk)));
            out = dispatch(b, [&](auto tag) { return run_verify<typename decltype(tag)::type>(va, b); });
        } else if (simulate->parsed()) {
            common = &sa.common;
            out = run_simulate(sa);
        } else if (alt->parsed()) {
            common = &aa.common;
            const Backend b = explicit_or(aa.common, auto_backend_for_m(aa.m));
            out = dispatch(b, [&](auto tag) { return run_alt<typename decltype(tag)::type>(aa, b); });
        } else if (selftest_cmd->parsed()) {
            common = &sta.common;
            out = run_self_test_cmd(sta);
        }
        emit(out, *common);
        return kOk;
    } catch (const CheckFailure& f) {
        try {
            if (common) emit(f.payload, *common);
        } catch (const Error& e) {
            std::cerr << error_json(e).dump() << "\n";
        }
        std::cerr << json{{"error", {{"kind", "check-failed"}, {"message", "a check did not hold"}}}}.dump() << "\n";
        return kCheckFailed;
    } catch (const Error& e) {
        std::cerr << error_json(e).dump() << "\n";
        return e.kind() == "internal-error" ? kCheckFailed : kInvalid;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"kind", "internal-error"}, {"message", e.what()}}}}.dump() << "\n";
        return kCheckFailed;
    }
}
