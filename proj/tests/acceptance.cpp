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

// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--only N[,N...]] [--known-fail N[,N...]] [--data DIR]

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "conewalk/alt_construction.hpp"
#include "conewalk/exit_moments.hpp"
#include "conewalk/json_io.hpp"
#include "conewalk/self_test.hpp"
#include "conewalk/simulator.hpp"

#ifndef CONEWALK_DATA_DIR
#define CONEWALK_DATA_DIR "data"
#endif

using namespace conewalk;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail = what;
            pass = false;
        }
    }
};

using Rng = std::mt19937_64;
std::string g_data_dir = CONEWALK_DATA_DIR;

template <class F>
MomentTable<F> random_table(Rng& rng, int order) {
    std::uniform_int_distribution<int> num(-12, 12), den(1, 7);
    auto t = normalized_table<F>(order);
    for (int s = 3; s <= order; ++s)
        for (int k = 0; k <= s; ++k) t.set(k, s - k, from_rational<F>(Rational(num(rng), den(rng))));
    return t;
}

Quadratic random_quadratic(Rng& rng) {
    std::uniform_int_distribution<int> num(-12, 12), den(1, 7);
    return Quadratic(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), 3);
}

BigFloat rel_tol() { return ldexp(BigFloat(1), -128); }

// ---------------------------------------------------------------------------

Outcome matrices() {
    Outcome o;
    auto ints = [](std::initializer_list<std::initializer_list<int>> rows) {
        Matrix<Rational> m;
        for (const auto& r : rows) {
            std::vector<Rational> row;
            for (int v : r) row.emplace_back(v);
            m.push_back(row);
        }
        return m;
    };
    const auto M3 = ints({{3, 0, 1, 0}, {0, 1, 0, 3}, {1, 0, 0, 0}, {1, 1, 1, 1}});
    const auto M4 = ints({{6, 0, 1, 0, 0}, {0, 3, 0, 3, 0}, {0, 0, 1, 0, 6}, {1, 0, 0, 0, 0}, {1, 1, 1, 1, 1}});
    o.expect(build_matrix(3, std::optional<Rational>(1)).rows == M3, "M_{3,1} differs");
    o.expect(build_matrix(4, std::optional<Rational>(1)).rows == M4, "M_{4,1} differs");
    o.detail = o.pass ? "M_{3,1} and M_{4,1} entry-for-entry" : o.detail;
    return o;
}

Outcome cubic_closed_form() {
    Outcome o;
    Rng rng(301);
    const Quadratic r3 = Quadratic::sqrt_of(3);
    const auto cone = make_cone<Quadratic>(3);
    int n = 0;
    for (; n < 25; ++n) {
        auto mu = normalized_table<Quadratic>(3);
        for (int k = 0; k <= 3; ++k) mu.set(k, 3 - k, random_quadratic(rng));
        const auto h = construct_harmonic(cone, mu).h;
        const Quadratic A = h.coeff(2, 0);
        const Quadratic B = Quadratic(-3) * mu(2, 1) + mu(0, 3);
        const Quadratic C = Quadratic(3) * r3 * mu(2, 1) - r3 * mu(0, 3);
        o.expect(A.is_zero(), "A != 0");
        o.expect(h.coeff(0, 2) == B, "B differs: " + h.coeff(0, 2).str() + " vs " + B.str());
        o.expect(h.coeff(1, 1) == C, "C differs: " + h.coeff(1, 1).str() + " vs " + C.str());
        o.expect(h.homogeneous_part(3) == u_poly<Quadratic>(3), "top part is not u_3");
        o.expect(h.degree() == 3 && h.homogeneous_part(1).is_zero() && h.homogeneous_part(0).is_zero(),
                 "unexpected low-degree terms");
    }
    if (o.pass) o.detail = std::to_string(n) + " tables over Q(sqrt 3), A = 0 and B, C exact";
    return o;
}

Outcome walk_harmonicity() {
    Outcome o;
    const auto w = builtin_walk("m4-asym");
    const auto T = build_transform<Rational>(w);
    o.expect(T.cone.m == 4 && T.cone.b && *T.cone.b == 1, "walk is not in K_{pi/4} with b = 1");
    o.expect(check_no_overshoot(w), "walk violates no-overshoot");
    const auto mu = push_moments(w, T, 4);
    const auto res = construct_harmonic(T.cone, mu);
    o.expect(apply_lx(res.h, mu).output.is_zero(), "L_X h is not the zero polynomial");
    Rng rng(303);
    std::uniform_int_distribution<long> u(1, 60);
    int zero = 0;
    for (int i = 0; i < 200; ++i) {
        const long y1 = u(rng), y2 = u(rng);
        const Rational v = verify_one_step(res.h, w, T, y1, y2);
        if (v == 0) ++zero;
        o.expect(v == 0, "one-step defect " + v.str() + " at (" + std::to_string(y1) + "," + std::to_string(y2) + ")");
    }
    if (o.pass) o.detail = "walk m4-asym, 200/200 lattice points exact zero";
    return o;
}

Outcome alt_equivalence() {
    Outcome o;
    Rng rng(304);
    for (int rep = 0; rep < 3; ++rep) {
        const auto mu2 = random_table<Rational>(rng, 2);
        o.expect(build_harmonic_alt(make_cone<Rational>(2), mu2) == construct_harmonic(make_cone<Rational>(2), mu2).h,
                 "m=2 differs");
        auto mu3 = normalized_table<Quadratic>(3);
        for (int k = 0; k <= 3; ++k) mu3.set(k, 3 - k, random_quadratic(rng));
        o.expect(build_harmonic_alt(make_cone<Quadratic>(3), mu3) == construct_harmonic(make_cone<Quadratic>(3), mu3).h,
                 "m=3 differs");
        const auto mu4 = random_table<Rational>(rng, 4);
        o.expect(build_harmonic_alt(make_cone<Rational>(4), mu4) == construct_harmonic(make_cone<Rational>(4), mu4).h,
                 "m=4 differs");
    }
    PrecisionScope scope(256);
    BigFloat worst = 0;
    for (int m = 5; m <= 7; ++m)
        for (int rep = 0; rep < 3; ++rep) {
            const auto mu = random_table<BigFloat>(rng, m);
            const auto res = construct_harmonic(make_cone<BigFloat>(m), mu);
            const auto alt = build_harmonic_alt(make_cone<BigFloat>(m), mu);
            const BigFloat rel = max_abs_coeff(alt - res.h) / std::max(BigFloat(1), max_abs_coeff(res.h));
            worst = std::max(worst, rel);
            o.expect(rel <= rel_tol(), "m=" + std::to_string(m) + " relative difference " + rel.str(6));
        }
    if (o.pass) o.detail = "m=2..4 identical; m=5..7 worst relative difference " + worst.str(3);
    return o;
}

template <class F>
bool kernel_is_u(const KernelInfo<F>& k, int n, const BigFloat& scale) {
    if (k.dimension != 1 || !k.basis) return false;
    const auto u = u_poly<F>(n).homogeneous_coeffs(n);
    const auto& v = *k.basis;
    // v proportional to u: every 2x2 minor vanishes
    for (int i = 0; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            if (!negligible(F(v[i] * u[j] - v[j] * u[i]), scale)) return false;
    return true;
}

Outcome kernel_dichotomy() {
    Outcome o;
    int resonant = 0, nonresonant = 0, float_resonant = 0;
    for (int n = 2; n <= 10; ++n)
        for (int q = 1; q < n; ++q) {
            const auto t = exact_tan(q, n);
            if (t) {
                std::optional<Quadratic> b;
                if (!t->vertical) b = t->value;
                const auto k = kernel_dimension(build_matrix(n, b));
                o.expect(kernel_is_u(k, n, BigFloat(1)), "n=" + std::to_string(n) + " q=" + std::to_string(q) +
                                                             ": kernel is not spanned by u_n");
                ++resonant;
            }
            PrecisionScope scope(256);
            const BigFloat angle = big_pi() * q / n;
            std::optional<BigFloat> bf;
            if (2 * q != n) bf = BigFloat(tan(angle));
            const auto M = build_matrix(n, bf);
            const auto k = kernel_dimension(M);
            o.expect(kernel_is_u(k, n, max_abs(M.rows)),
                     "float n=" + std::to_string(n) + " q=" + std::to_string(q) + ": kernel is not spanned by u_n");
            ++float_resonant;
        }
    Rng rng(305);
    std::uniform_int_distribution<int> num(-200, 200), den(1, 97);
    int drawn = 0;
    while (drawn < 50) {
        const Rational b(num(rng), den(rng));
        if (b == 0 || b == 1 || b == -1) continue;  // the only rational resonant tangents
        ++drawn;
        for (int n = 2; n <= 10; ++n) {
            const int d = kernel_dimension(build_matrix(n, std::optional<Rational>(b))).dimension;
            o.expect(d == 0, "b=" + b.str() + " n=" + std::to_string(n) + ": kernel dimension " + std::to_string(d));
            ++nonresonant;
        }
    }
    if (o.pass)
        o.detail = std::to_string(resonant) + " exact and " + std::to_string(float_resonant) +
                   " float resonant pairs with kernel u_n; " + std::to_string(nonresonant) + " random pairs trivial";
    return o;
}

/// Slopes used for the pivot identity: every exactly representable tan(q pi / m) and a few rationals.
std::vector<Quadratic> pivot_slopes() {
    std::vector<Quadratic> out;
    for (int m = 2; m <= 12; ++m)
        for (int q = 1; q < m; ++q)
            if (const auto t = exact_tan(q, m); t && !t->vertical) out.push_back(t->value);
    for (const Rational& r : {Rational(2), Rational(-1, 3), Rational(5, 7)}) out.emplace_back(r);
    return out;
}

Outcome theta_identity() {
    Outcome o;
    int checked = 0, literal_fail = 0, signed_fail = 0;
    std::set<int> failing_n;
    for (int n = 3; n <= 12; ++n)
        for (const Quadratic& b : pivot_slopes()) {
            const auto t = triangularize_odd(n, b);
            const Quadratic lhs = t.theta * Quadratic(Rational(binomial(n, 2 * t.n_odd + 1)));
            const Quadratic u = u_poly<Quadratic>(n).evaluate(Quadratic(1), b);
            ++checked;
            if (lhs != u) {
                ++literal_fail;
                failing_n.insert(n);
            }
            const Quadratic signed_u = t.n_odd % 2 ? -u : u;
            if (lhs != signed_u) ++signed_fail;
        }
    std::ostringstream ns;
    for (int n : failing_n) ns << (ns.tellp() ? "," : "") << n;
    o.pass = literal_fail == 0;
    std::ostringstream d;
    d << checked << " (n, b) pairs; literal identity fails on " << literal_fail << " (n in {" << ns.str()
      << "}); identity with the sign (-1)^{n_odd} fails on " << signed_fail;
    o.detail = d.str();
    return o;
}

Outcome first_moment() {
    Outcome o;
    Rng rng(307);
    std::uniform_int_distribution<int> num(1, 400), den(1, 97);
    for (int i = 0; i < 20; ++i) {
        const Rational b(num(rng), den(rng));
        const auto cone = make_cone_from_b(b);
        const auto G = tau_moment_poly(1, cone, normalized_table<Rational>(2)).G;
        o.expect(G == Poly<Rational>::monomial(1, 1, b) - Poly<Rational>::monomial(0, 2), "G_1 differs at b=" + b.str());
    }
    {
        PrecisionScope scope(256);
        std::uniform_real_distribution<double> ua(0.01, 1.56);
        for (int i = 0; i < 20; ++i) {
            const BigFloat alpha(ua(rng));
            const auto cone = make_cone_from_alpha<BigFloat>(alpha);
            const auto G = first_moment_poly(cone);
            const BigFloat t = tan(alpha);
            o.expect(G.terms().size() == 2 && abs(G.coeff(1, 1) - t) <= rel_tol() * std::max(BigFloat(1), abs(t)) &&
                         G.coeff(0, 2) == -1,
                     "G_1 differs at alpha=" + alpha.str(10));
        }
    }
    const auto G = first_moment_poly(make_cone_from_b(Rational(3, 2)));
    for (int i = 0; i < 20; ++i) {
        const auto mu = random_table<Rational>(rng, 2 + i % 5);
        o.expect(apply_lx(G, mu).output == Poly<Rational>::constant(-1), "L_X G_1 != -1");
    }
    if (o.pass) o.detail = "20 exact slopes, 20 float angles, L_X G_1 = -1 on 20 tables";
    return o;
}

Outcome second_moment() {
    Outcome o;
    PrecisionScope scope(256);
    const std::string path = g_data_dir + "/moments/sample-order6.json";
    const auto mu = load_moments<BigFloat>(path, parse_backend("float:256"));
    const auto cone = make_cone<BigFloat>(5);
    const auto r = tau_moment_poly(2, cone, mu);
    o.expect(r.G.degree() == 4, "degree " + std::to_string(r.G.degree()));
    const BigFloat scale = r.scale;
    o.expect(vanishes_on_boundary(r.G, cone, scale), "G_2 does not vanish on both rays");
    const auto q1 = divide_by_linear(r.G, BigFloat(0), BigFloat(1));
    const auto q2 = divide_by_linear(q1.quotient, *cone.b, BigFloat(-1));
    const BigFloat rem = std::max(max_abs_coeff(q1.remainder), max_abs_coeff(q2.remainder));
    o.expect(rem <= rel_tol() * scale, "not divisible by x2 (x1 b - x2): remainder " + rem.str(6));
    const BigFloat res = max_abs_coeff(r.residual);
    o.expect(res <= rel_tol() * scale, "recursion residual " + res.str(6));
    if (o.pass) o.detail = "alpha = pi/5, table " + std::string("sample-order6.json") + ", residual " + res.str(3) +
                           " (scale " + scale.str(3) + "), remainder " + rem.str(3);
    return o;
}

Outcome monte_carlo() {
    Outcome o;
    SimConfig cfg;
    cfg.walk = builtin_walk("diagonal");
    cfg.paths = 1'000'000;
    cfg.seed = 42;
    cfg.checks = {"tau-mean", "exit-position", "tail"};
    const auto rep = sample_exit(cfg);
    std::ostringstream d;
    for (const auto& c : rep.checks) {
        o.expect(c.pass, c.name + " off by z = " + std::to_string(c.z));
        d << c.name << " " << c.estimate << " +- " << c.std_error << " (target " << c.target << "); ";
    }
    o.expect(std::fabs(rep.checks.front().target - 2.0) < 1e-12, "E[tau] target is not 2");
    if (rep.tail) {
        o.expect(rep.tail->pass, "tail slope " + std::to_string(rep.tail->slope));
        d << "tail slope " << rep.tail->slope << " (target " << rep.tail->target << ")";
    } else {
        o.expect(false, "no tail fit");
    }
    if (o.pass) o.detail = d.str();
    else o.detail += "; " + d.str();
    return o;
}

template <class F>
void positivity_for(const WalkSpec& w, Outcome& o, int& points) {
    const auto T = build_transform<F>(w);
    if (T.cone.mode != ConeSpec<F>::Mode::integer_m) return;
    const auto res = construct_harmonic(T.cone, push_moments(w, T, std::max(T.cone.m, 2)));
    for (long y1 = 0; y1 <= 50; ++y1)
        for (long y2 = 0; y1 * y1 + y2 * y2 <= 2500; ++y2) {
            const auto [x1, x2] = T.apply(y1, y2);
            const F v = res.h.evaluate(x1, x2);
            const bool ok = field_traits<F>::sign(v) >= 0 || negligible(v, res.scale * BigFloat(1e12));
            o.expect(ok, w.name + ": h < 0 at (" + std::to_string(y1) + "," + std::to_string(y2) + ")");
            ++points;
        }
}

Outcome positivity() {
    Outcome o;
    int points = 0;
    std::vector<std::string> names;
    for (const auto& w : builtin_walks()) {
        const auto d = transform_field(w);
        if (d == 0) positivity_for<Rational>(w, o, points);
        else if (d > 0) positivity_for<Quadratic>(w, o, points);
        else {
            PrecisionScope scope(256);
            positivity_for<BigFloat>(w, o, points);
        }
        names.push_back(w.name);
    }
    if (o.pass) {
        o.detail = std::to_string(points) + " points over";
        for (const auto& n : names) o.detail += " " + n;
    }
    return o;
}

Outcome property_suite() {
    Outcome o;
    int total = 0;
    for (bool exact : {true, false}) {
        PrecisionScope scope(256);
        const auto rep = run_self_test(exact);
        for (const auto& p : rep.properties) {
            ++total;
            o.expect(p.pass, std::string(exact ? "exact " : "float ") + p.module + "/" + p.name + ": " + p.detail);
        }
    }
    if (o.pass) o.detail = std::to_string(total) + " property runs (exact and float:256)";
    return o;
}

std::set<int> parse_list(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only, known_fail;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) only = parse_list(argv[++i]);
        else if (a == "--known-fail" && i + 1 < argc) known_fail = parse_list(argv[++i]);
        else if (a == "--data" && i + 1 < argc) g_data_dir = argv[++i];
        else {
            std::cerr << "usage: acceptance [--only N,...] [--known-fail N,...] [--data DIR]\n";
            return 2;
        }
    }
    set_float_precision(256);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"matrix reproduction", matrices},
        {"m=3 closed form", cubic_closed_form},
        {"exact end-to-end harmonicity", walk_harmonicity},
        {"oracle equivalence", alt_equivalence},
        {"kernel dichotomy", kernel_dichotomy},
        {"theta identity", theta_identity},
        {"exit-time first moment", first_moment},
        {"higher moments", second_moment},
        {"Monte Carlo agreement", monte_carlo},
        {"positivity spot check", positivity},
        {"property suite", property_suite},
    };

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool known = known_fail.count(id) > 0;
        std::string tag = o.pass ? "PASS" : "FAIL";
        if (known) tag += o.pass ? " (listed as known-fail)" : " (known)";
        std::printf("%s [%d] %s (%.2f s): %s\n", tag.c_str(), id, criteria[i].first.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass && !known) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
