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

#ifndef CONEWALK_SIMULATOR_HPP
#define CONEWALK_SIMULATOR_HPP

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "conewalk/exit_moments.hpp"

namespace conewalk {

inline const std::set<std::string>& known_checks() {
    static const std::set<std::string> k{"tau-mean", "tau-second", "exit-position", "harmonicity", "tail"};
    return k;
}

struct SimConfig {
    WalkSpec walk;
    long start1 = 1;
    long start2 = 1;
    std::uint64_t paths = 1;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 10'000'000;
    std::set<std::string> checks{"tau-mean"};
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const {
        if (start1 < 1 || start2 < 1) throw Error("start-not-interior", "start must have both coordinates >= 1");
        if (paths < 1) throw Error("invalid-config", "paths must be >= 1");
        if (max_steps < 1) throw Error("invalid-config", "max_steps must be >= 1");
        for (const auto& c : checks)
            if (!known_checks().count(c)) throw Error("invalid-config", "unknown check '" + c + "'");
        walk.validate();
    }
};

struct CheckResult {
    std::string name;
    double estimate = 0;
    double std_error = 0;
    double target = 0;
    double z = 0;
    bool pass = false;
    double bracket_low = 0;  // E[tau] only: mean over completed paths and with truncated paths set to max_steps
    double bracket_high = 0;
    double exact_discrepancy = 0;  // harmonicity only: exact one-step sum minus h(x)
};

struct TailFit {
    double slope = 0;
    double slope_std_error = 0;
    double target = 0;
    bool pass = false;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> survivors;  // (n, #paths with tau > n) used in the fit
};

struct SimReport {
    std::string walk;
    long start1 = 0, start2 = 0;
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;
    std::uint64_t truncated = 0;
    std::vector<CheckResult> checks;
    std::optional<TailFit> tail;
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return !tail || tail->pass;
    }
};

namespace detail {

constexpr int kSurvivalBins = 64;
constexpr std::uint64_t kChunk = 4096;

struct ChunkSums {
    std::uint64_t completed = 0;
    std::uint64_t truncated = 0;
    double tau = 0, tau_sq = 0;              // completed paths
    double tau_capped = 0, tau_capped_sq = 0, tau_capped_4 = 0;  // all paths, truncated at max_steps
    double x1sq = 0, x1sq_sq = 0, x2sq = 0, x2sq_sq = 0;  // completed paths
    double h = 0, h_sq = 0;
    std::array<std::uint64_t, kSurvivalBins> survive{};  // tau > 2^i

    void add(const ChunkSums& o) {
        completed += o.completed;
        truncated += o.truncated;
        tau += o.tau;
        tau_sq += o.tau_sq;
        tau_capped += o.tau_capped;
        tau_capped_sq += o.tau_capped_sq;
        tau_capped_4 += o.tau_capped_4;
        x1sq += o.x1sq;
        x1sq_sq += o.x1sq_sq;
        x2sq += o.x2sq;
        x2sq_sq += o.x2sq_sq;
        h += o.h;
        h_sq += o.h_sq;
        for (int i = 0; i < kSurvivalBins; ++i) survive[i] += o.survive[i];
    }
};

/// Pairwise reduction in chunk order; independent of how chunks were scheduled.
inline ChunkSums pairwise_reduce(const std::vector<ChunkSums>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return v[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    ChunkSums a = pairwise_reduce(v, lo, mid);
    a.add(pairwise_reduce(v, mid, hi));
    return a;
}

struct Sampler {
    std::vector<std::uint64_t> cumulative;  // numerators of the cumulative law over a common denominator
    std::uint64_t denominator = 1;
    std::vector<std::pair<int, int>> jumps;

    explicit Sampler(const WalkSpec& w) {
        Integer den = 1;
        for (const auto& a : w.atoms) den = lcm(den, Integer(bmp::denominator(a.p)));
        if (den > Integer(std::numeric_limits<std::uint64_t>::max() / 2))
            throw Error("invalid-walk", "probability denominators are too large for exact sampling");
        denominator = den.convert_to<std::uint64_t>();
        std::uint64_t acc = 0;
        for (const auto& a : w.atoms) {
            const Rational scaled = a.p * Rational(den);
            acc += bmp::numerator(scaled).convert_to<std::uint64_t>();
            cumulative.push_back(acc);
            jumps.emplace_back(a.dy1, a.dy2);
        }
    }

    template <class Rng>
    const std::pair<int, int>& draw(Rng& rng) const {
        std::uniform_int_distribution<std::uint64_t> u(0, denominator - 1);
        const std::uint64_t v = u(rng);
        std::size_t i = 0;
        while (v >= cumulative[i]) ++i;
        return jumps[i];
    }
};

/// Per-path stream: the engine is seeded with a splitmix64-style mix of (seed, path).
inline std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (path + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return std::mt19937_64(z ^ (z >> 31));
}

struct Targets {
    double t00 = 0, t01 = 0, t11 = 0;
    Poly<double> h_pulled;  // h(T y)
    bool need_h = false;
};

inline ChunkSums run_chunk(const SimConfig& cfg, const Sampler& sampler, const Targets& tg, std::uint64_t first,
                           std::uint64_t last) {
    ChunkSums s;
    for (std::uint64_t p = first; p < last; ++p) {
        auto rng = path_rng(cfg.seed, p);
        long y1 = cfg.start1, y2 = cfg.start2;
        std::uint64_t steps = 0;
        while (y1 > 0 && y2 > 0 && steps < cfg.max_steps) {
            const auto& d = sampler.draw(rng);
            y1 += d.first;
            y2 += d.second;
            ++steps;
            if (steps == 1 && tg.need_h) {
                const double v = (y1 > 0 && y2 > 0) ? tg.h_pulled.evaluate(double(y1), double(y2)) : 0.0;
                s.h += v;
                s.h_sq += v * v;
            }
        }
        const bool done = !(y1 > 0 && y2 > 0);
        const double t = static_cast<double>(steps);
        s.tau_capped += t;
        s.tau_capped_sq += t * t;
        s.tau_capped_4 += t * t * t * t;
        if (done) {
            ++s.completed;
            s.tau += t;
            s.tau_sq += t * t;
            const double x1 = tg.t00 * double(y1) + tg.t01 * double(y2);
            const double x2 = tg.t11 * double(y2);
            s.x1sq += x1 * x1;
            s.x1sq_sq += x1 * x1 * x1 * x1;
            s.x2sq += x2 * x2;
            s.x2sq_sq += x2 * x2 * x2 * x2;
        } else {
            ++s.truncated;
        }
        for (int i = 0; i < kSurvivalBins; ++i) {
            if (steps > (std::uint64_t{1} << i))
                ++s.survive[i];
            else
                break;
        }
    }
    return s;
}

inline ChunkSums simulate(const SimConfig& cfg, const Targets& tg) {
    const Sampler sampler(cfg.walk);
    const std::uint64_t chunks = (cfg.paths + kChunk - 1) / kChunk;
    std::vector<ChunkSums> results(chunks);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            results[c] = run_chunk(cfg, sampler, tg, c * kChunk, std::min(cfg.paths, (c + 1) * kChunk));
        }
    };
    unsigned nt = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    nt = static_cast<unsigned>(std::min<std::uint64_t>(nt, chunks));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return pairwise_reduce(results, 0, results.size());
}

inline void mean_se(double sum, double sum_sq, std::uint64_t n, double& mean, double& se) {
    mean = n ? sum / double(n) : 0.0;
    if (n < 2) {
        se = 0;
        return;
    }
    const double var = std::max(0.0, (sum_sq - double(n) * mean * mean) / double(n - 1));
    se = std::sqrt(var / double(n));
}

inline void finish_z(CheckResult& c) {
    const double diff = c.estimate - c.target;
    const double noise = 1e-9 * std::max(1.0, std::fabs(c.target));
    if (c.std_error > 0)
        c.z = diff / c.std_error;
    else
        c.z = std::fabs(diff) <= noise ? 0.0 : std::copysign(INFINITY, diff);
    c.pass = std::fabs(c.z) <= 3.0;
}

}  // namespace detail

/// Least-squares slope of log P(tau > n) against log n over dyadic n >= 64 with >= 100 survivors.
inline TailFit fit_tail(const std::array<std::uint64_t, detail::kSurvivalBins>& survive, std::uint64_t paths,
                        std::uint64_t max_steps, double p_alpha) {
    TailFit fit;
    fit.target = -p_alpha / 2.0;
    std::vector<double> xs, ys;
    for (int i = 6; i < detail::kSurvivalBins; ++i) {
        const std::uint64_t n = std::uint64_t{1} << i;
        if (n >= max_steps || survive[i] < 100) break;
        fit.survivors.emplace_back(n, survive[i]);
        xs.push_back(std::log(double(n)));
        ys.push_back(std::log(double(survive[i]) / double(paths)));
    }
    if (xs.size() < 3) throw Error("insufficient-survivors", "need at least 100 paths surviving past n = 256");
    const double k = double(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + fit.slope * (xs[i] - mx));
        rss += r * r;
    }
    fit.slope_std_error = xs.size() > 2 ? std::sqrt(rss / (k - 2) / sxx) : 0.0;
    fit.pass = std::fabs(fit.slope - fit.target) <= 0.15;
    return fit;
}

/// Runs the configured Monte Carlo checks against the exact targets.
inline SimReport sample_exit(const SimConfig& cfg) {
    cfg.validate();
    const auto T = build_transform<BigFloat>(cfg.walk);
    const auto& cone = T.cone;
    auto wants = [&](const char* c) { return cfg.checks.count(c) > 0; };
    const BigFloat p = cone.p_alpha;
    if (wants("tau-mean") && !(BigFloat(2) < p))
        throw Error("moment-check-invalid", "E[tau] is infinite for this walk's angle");
    if (wants("tau-second") && !(BigFloat(4) < p))
        throw Error("moment-check-invalid", "E[tau^2] is infinite for this walk's angle");
    if (wants("exit-position") && !(BigFloat(2) < p))
        throw Error("moment-check-invalid", "second exit-position moments need alpha < pi/2");
    if (wants("harmonicity") && cone.mode != ConeSpec<BigFloat>::Mode::integer_m)
        throw Error("moment-check-invalid", "harmonic polynomial needs alpha = pi/m");
    if (wants("harmonicity") && !check_no_overshoot(cfg.walk))
        throw Error("moment-check-invalid", "harmonicity check needs the no-overshoot condition");

    detail::Targets tg;
    tg.t00 = T.t00.convert_to<double>();
    tg.t01 = T.t01.convert_to<double>();
    tg.t11 = T.t11.convert_to<double>();
    const auto [x1, x2] = T.apply(cfg.start1, cfg.start2);

    std::optional<HarmonicResult<BigFloat>> harmonic;
    if (wants("harmonicity")) {
        const auto mu = push_moments(cfg.walk, T, std::max(cone.m, 2));
        harmonic = construct_harmonic(cone, mu);
        tg.h_pulled = poly_cast<double>(T.pull_back(harmonic->h));
        tg.need_h = true;
    }

    const detail::ChunkSums s = detail::simulate(cfg, tg);
    SimReport rep;
    rep.walk = cfg.walk.name;
    rep.start1 = cfg.start1;
    rep.start2 = cfg.start2;
    rep.paths = cfg.paths;
    rep.seed = cfg.seed;
    rep.max_steps = cfg.max_steps;
    rep.truncated = s.truncated;

    if (wants("tau-mean")) {
        CheckResult c;
        c.name = "tau-mean";
        double m_done = 0, se_done = 0, m_cap = 0, se_cap = 0;
        detail::mean_se(s.tau, s.tau_sq, s.completed, m_done, se_done);
        detail::mean_se(s.tau_capped, s.tau_capped_sq, cfg.paths, m_cap, se_cap);
        c.estimate = m_cap;
        c.std_error = se_cap;
        c.target = first_moment_poly(cone).evaluate(x1, x2).convert_to<double>();
        c.bracket_low = std::min(m_done, m_cap);
        c.bracket_high = std::max(m_done, m_cap);
        detail::finish_z(c);
        const double se = std::max(se_done, se_cap);
        c.pass = c.target >= c.bracket_low - 3 * se && c.target <= c.bracket_high + 3 * se;
        rep.checks.push_back(c);
    }
    if (wants("tau-second")) {
        const auto mu = push_moments(cfg.walk, T, 4);
        const auto G2 = tau_moment_poly(2, cone, mu).G;
        CheckResult c;
        c.name = "tau-second";
        detail::mean_se(s.tau_capped_sq, s.tau_capped_4, cfg.paths, c.estimate, c.std_error);
        c.target = G2.evaluate(x1, x2).convert_to<double>();
        detail::finish_z(c);
        rep.checks.push_back(c);
    }
    if (wants("exit-position")) {
        const auto ep = exit_position_moments(cone, x1, x2);
        for (int j = 1; j <= 2; ++j) {
            CheckResult c;
            c.name = j == 1 ? "exit-position-1" : "exit-position-2";
            if (j == 1)
                detail::mean_se(s.x1sq, s.x1sq_sq, s.completed, c.estimate, c.std_error);
            else
                detail::mean_se(s.x2sq, s.x2sq_sq, s.completed, c.estimate, c.std_error);
            c.target = (j == 1 ? *ep.second1 : *ep.second2).convert_to<double>();
            detail::finish_z(c);
            rep.checks.push_back(c);
        }
    }
    if (wants("harmonicity")) {
        CheckResult c;
        c.name = "harmonicity";
        detail::mean_se(s.h, s.h_sq, cfg.paths, c.estimate, c.std_error);
        const BigFloat hx = harmonic->h.evaluate(x1, x2);
        c.target = hx.convert_to<double>();
        // exact one-step sum with the killing indicator
        BigFloat acc = 0;
        for (const auto& a : cfg.walk.atoms) {
            if (cfg.start1 + a.dy1 <= 0 || cfg.start2 + a.dy2 <= 0) continue;
            const auto [z1, z2] = T.apply(cfg.start1 + a.dy1, cfg.start2 + a.dy2);
            acc += BigFloat(a.p) * harmonic->h.evaluate(z1, z2);
        }
        c.exact_discrepancy = BigFloat(acc - hx).convert_to<double>();
        detail::finish_z(c);
        const BigFloat tol = ldexp(BigFloat(1), -static_cast<int>(float_precision() / 2)) *
                             std::max(BigFloat(1), harmonic->scale) * std::max(BigFloat(1), abs(hx));
        c.pass = c.pass && abs(acc - hx) <= tol;
        rep.checks.push_back(c);
    }
    if (wants("tail")) rep.tail = fit_tail(s.survive, cfg.paths, cfg.max_steps, p.convert_to<double>());
    return rep;
}

/// Tail exponent alone.
inline TailFit tail_exponent(SimConfig cfg) {
    cfg.checks = {"tail"};
    return *sample_exit(cfg).tail;
}

}  // namespace conewalk

#endif  // CONEWALK_SIMULATOR_HPP
