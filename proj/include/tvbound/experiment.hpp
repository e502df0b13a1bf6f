// experiment.hpp
//
// Monte Carlo engine. Every trial is a pure function of (config, m, trial
// index): its stream seed is derive_seed(master_seed, m, trial). Trials run
// in parallel and write into per-index slots; all reductions walk the slots
// in index order, so results are identical for any thread count.
//
// Statistical audits use a k-standard-error margin: k = 3 when trials >= 10^4,
// k = 5 for smaller (smoke) runs.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tvbound/conf_bounds.hpp"
#include "tvbound/dist_core.hpp"
#include "tvbound/empirical.hpp"
#include "tvbound/errors.hpp"
#include "tvbound/oracle_bounds.hpp"
#include "tvbound/parallel.hpp"
#include "tvbound/rademacher.hpp"
#include "tvbound/sampling.hpp"
#include "tvbound/stats.hpp"

namespace tvbound {

inline constexpr std::uint64_t kDefaultTrials = 10'000;
inline constexpr std::uint64_t kMinCoverageTrials = 100;

inline double sigma_multiplier(std::uint64_t trials) noexcept { return trials >= kDefaultTrials ? 3.0 : 5.0; }

struct ExperimentConfig {
    FamilySpec family = UniformFamily{10};
    std::vector<std::uint64_t> m_values;
    std::vector<double> delta_values;
    std::uint64_t trials = kDefaultTrials;
    std::uint64_t master_seed = 0;
    std::vector<BoundKind> bounds_enabled{kAllBoundKinds.begin(), kAllBoundKinds.end()};
    std::string json_path;  // empty: not written
    std::string csv_path;
    unsigned threads = 0;  // 0: hardware concurrency; never affects results
    double debug_bound_scale = 1.0;  // harness self-test: multiplies every bound before tallying
};

/// Every violation of the config's invariants, in a stable order.
inline std::vector<std::string> validate(const ExperimentConfig& cfg) {
    std::vector<std::string> v;
    try {
        make_family(cfg.family);
    } catch (const ParameterError& e) {
        v.push_back(std::string("family: ") + e.what());
    }
    if (cfg.m_values.empty()) v.emplace_back("m_values must be nonempty");
    for (auto m : cfg.m_values)
        if (m < 1) v.emplace_back("m_values entries must be positive");
    if (cfg.delta_values.empty()) v.emplace_back("delta_values must be nonempty");
    for (double d : cfg.delta_values)
        if (!(d > 0.0 && d < 1.0)) v.push_back("delta_values entry " + detail::fmt_num(d) + " is outside (0,1)");
    if (cfg.trials < kMinCoverageTrials)
        v.push_back("trials must be at least " + std::to_string(kMinCoverageTrials) + " for coverage claims");
    if (cfg.bounds_enabled.empty()) v.emplace_back("bounds_enabled must be nonempty");
    if (!std::isfinite(cfg.debug_bound_scale)) v.emplace_back("debug_bound_scale must be finite");
    return v;
}

inline void require_valid(const ExperimentConfig& cfg) {
    if (auto v = validate(cfg); !v.empty()) throw ConfigError(std::move(v));
}

struct CoverageCell {
    std::uint64_t m = 0;
    double delta = 0.0;
    BoundKind kind = BoundKind::PhiUpper;
    std::uint64_t trials = 0;
    std::uint64_t covered = 0;
    double coverage_hat = 0.0;
    double se = 0.0;         // sqrt(p(1-p)/N)
    double threshold = 0.0;  // 1 - delta - k sqrt(delta(1-delta)/N)
    double mean_bound = 0.0;
    bool passed = false;
};

struct MomentRow {
    std::uint64_t m = 0;
    MeanSe tv;
    MeanSe phi;
    MeanSe missing_mass;
    MeanSe rademacher;
    LambdaReport lambda;
    double expected_phi_upper = 0.0;
    std::optional<BkSandwich> bk;  // m >= 2 only
};

/// One assertion: passed iff lhs <= rhs.
struct Audit {
    std::string name;
    std::uint64_t m = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::string family_label;
    std::string generator{kGeneratorIdentity};
    double sigma_multiplier = 3.0;
    std::vector<CoverageCell> coverage;
    std::vector<MomentRow> moments;
    std::vector<Audit> audits;
    double wall_clock_seconds = 0.0;  // informational; excluded from CSV

    bool all_passed() const noexcept {
        for (const auto& c : coverage)
            if (!c.passed) return false;
        for (const auto& a : audits)
            if (!a.passed) return false;
        return true;
    }
};

/// Per-trial statistics of one draw of size m.
struct TrialRecord {
    double tv = 0.0;
    double phi = 0.0;
    double rademacher = 0.0;
    double missing_mass = 0.0;
};

inline TrialRecord run_trial(const Distribution& mu, const Sampler& sampler, std::uint64_t m, std::uint64_t seed) {
    Rng rng(seed);
    const auto counts = sampler.draw_counts(m, rng);
    const auto e = empirical_from_positions(sampler.indices(), counts);
    return {tv_distance(e.base(), mu), phi(e), empirical_rademacher_exact(e), missing_mass(mu, e)};
}

/// Trials t = 0..n-1 of size m with streams derive_seed(seed, m, t).
inline std::vector<TrialRecord> run_trials(const Distribution& mu, std::uint64_t m, std::uint64_t trials,
                                           std::uint64_t seed, unsigned threads) {
    const Sampler sampler(mu);
    std::vector<TrialRecord> out(trials);
    parallel_for(trials, threads, [&](std::size_t t) { out[t] = run_trial(mu, sampler, m, derive_seed(seed, m, t)); });
    return out;
}

namespace detail {

template <class F>
MeanSe mean_se_of(const std::vector<TrialRecord>& recs, F f) {
    std::vector<double> xs(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) xs[i] = f(recs[i]);
    return mean_se(xs);
}

}  // namespace detail

/**
 * Coverage audit plus expectation checks for one family. For each m, each
 * trial computes TV(mhat, mu), phi, exact Rhat and the missing mass; every
 * enabled bound at every delta is then tallied as covered/violated.
 */
inline ExperimentResult run_coverage(const ExperimentConfig& cfg) {
    require_valid(cfg);
    const auto start = std::chrono::steady_clock::now();
    const Distribution mu = make_family(cfg.family);
    ExperimentResult res;
    res.config = cfg;
    res.family_label = to_string(cfg.family);
    const double k = sigma_multiplier(cfg.trials);
    res.sigma_multiplier = k;
    const double n = static_cast<double>(cfg.trials);

    for (std::uint64_t m : cfg.m_values) {
        const auto recs = run_trials(mu, m, cfg.trials, cfg.master_seed, cfg.threads);

        for (double delta : cfg.delta_values) {
            for (BoundKind kind : cfg.bounds_enabled) {
                CoverageCell cell{m, delta, kind, cfg.trials};
                double bound_sum = 0.0;
                for (const auto& r : recs) {
                    const double stat = uses_phi(kind) ? r.phi : r.rademacher;
                    const double b = cfg.debug_bound_scale * evaluate_bound(kind, m, delta, stat);
                    bound_sum += b;
                    const bool ok = is_upper(kind) ? r.tv <= b : r.tv >= b;
                    cell.covered += ok;
                }
                const auto p = proportion(cell.covered, cfg.trials);
                cell.coverage_hat = p.mean;
                cell.se = p.se;
                cell.threshold = 1.0 - delta - k * std::sqrt(delta * (1.0 - delta) / n);
                cell.mean_bound = bound_sum / n;
                cell.passed = cell.coverage_hat >= cell.threshold;
                res.coverage.push_back(cell);
            }
        }

        MomentRow row;
        row.m = m;
        row.tv = detail::mean_se_of(recs, [](const TrialRecord& r) { return r.tv; });
        row.phi = detail::mean_se_of(recs, [](const TrialRecord& r) { return r.phi; });
        row.missing_mass = detail::mean_se_of(recs, [](const TrialRecord& r) { return r.missing_mass; });
        row.rademacher = detail::mean_se_of(recs, [](const TrialRecord& r) { return r.rademacher; });
        row.lambda = lambda_m(mu, m);
        row.expected_phi_upper = expected_phi_upper(mu, m);
        if (m >= 2) row.bk = bk_sandwich(mu, m);

        auto audit = [&](std::string name, double lhs, double rhs) {
            res.audits.push_back({std::move(name), m, lhs, rhs, lhs <= rhs});
        };
        const double lambda = row.lambda.lambda;
        audit("mean_phi <= 2 lambda", row.phi.mean, 2.0 * lambda + k * row.phi.se);
        audit("mean_phi <= expected_phi_upper", row.phi.mean, row.expected_phi_upper + k * row.phi.se);
        audit("expected_phi_upper <= 2 lambda", row.expected_phi_upper, 2.0 * lambda * (1.0 + 1e-12));
        if (row.bk) {
            audit("mean_tv <= lambda", row.tv.mean, row.bk->upper + k * row.tv.se);
            audit("bk_lower <= mean_tv", row.bk->lower - k * row.tv.se, row.tv.mean);
        }
        const auto tv_minus_phi = detail::mean_se_of(recs, [](const TrialRecord& r) { return r.tv - r.phi; });
        audit("mean_tv <= mean_phi", tv_minus_phi.mean, k * tv_minus_phi.se);
        const auto u_minus_2tv =
            detail::mean_se_of(recs, [](const TrialRecord& r) { return r.missing_mass - 2.0 * r.tv; });
        audit("mean_missing_mass <= 2 mean_tv", u_minus_2tv.mean, k * u_minus_2tv.se);
        const auto low_gap = detail::mean_se_of(
            recs, [](const TrialRecord& r) { return r.phi / (2.0 * std::numbers::sqrt2) - r.rademacher; });
        audit("mean_phi/(2 sqrt2) <= mean_rademacher", low_gap.mean, k * low_gap.se + 1e-12);
        const auto high_gap = detail::mean_se_of(recs, [](const TrialRecord& r) { return r.rademacher - r.phi / 2.0; });
        audit("mean_rademacher <= mean_phi/2", high_gap.mean, k * high_gap.se + 1e-12);
        res.moments.push_back(row);
    }
    res.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

// ---------------------------------------------------------------------------
// Focused probes

struct CurvePoint {
    std::uint64_t m = 0;
    MeanSe phi;
    MeanSe tv;
};

struct ConvergenceCurve {
    std::vector<CurvePoint> points;
    bool endpoint_decrease = false;  // mean phi at the last m below the first
};

inline ConvergenceCurve convergence_curve(const Distribution& mu, const std::vector<std::uint64_t>& m_schedule,
                                          std::uint64_t trials, std::uint64_t seed, unsigned threads = 0) {
    detail::require(!m_schedule.empty(), "m_schedule must be nonempty");
    detail::require(trials >= 1, "trials must be positive");
    for (std::size_t i = 0; i < m_schedule.size(); ++i) {
        detail::require(m_schedule[i] >= 1, "m values must be positive");
        if (i) detail::require(m_schedule[i] > m_schedule[i - 1], "m_schedule must be increasing");
    }
    ConvergenceCurve c;
    for (auto m : m_schedule) {
        const auto recs = run_trials(mu, m, trials, seed, threads);
        c.points.push_back({m, detail::mean_se_of(recs, [](const TrialRecord& r) { return r.phi; }),
                            detail::mean_se_of(recs, [](const TrialRecord& r) { return r.tv; })});
    }
    c.endpoint_decrease = c.points.size() >= 2 && c.points.back().phi.mean < c.points.front().phi.mean;
    return c;
}

struct MissingMassCheck {
    MeanSe two_tv;
    MeanSe missing;
    double combined_se = 0.0;
    bool holds = false;  // mean 2 TV >= mean U - 3 combined_se
};

inline MissingMassCheck missing_mass_inequality(const Distribution& mu, std::uint64_t m, std::uint64_t trials,
                                                std::uint64_t seed, unsigned threads = 0) {
    const auto recs = run_trials(mu, m, trials, seed, threads);
    MissingMassCheck r;
    r.two_tv = detail::mean_se_of(recs, [](const TrialRecord& t) { return 2.0 * t.tv; });
    r.missing = detail::mean_se_of(recs, [](const TrialRecord& t) { return t.missing_mass; });
    r.combined_se = std::hypot(r.two_tv.se, r.missing.se);
    r.holds = r.two_tv.mean >= r.missing.mean - 3.0 * r.combined_se;
    return r;
}

struct RademacherExpectation {
    MeanSe rademacher;
    MeanSe phi;
};

/// Monte Carlo estimate of the Rademacher complexity (mean of the exact Rhat).
inline RademacherExpectation rademacher_expectation(const Distribution& mu, std::uint64_t m, std::uint64_t trials,
                                                    std::uint64_t seed, unsigned threads = 0) {
    const auto recs = run_trials(mu, m, trials, seed, threads);
    return {detail::mean_se_of(recs, [](const TrialRecord& t) { return t.rademacher; }),
            detail::mean_se_of(recs, [](const TrialRecord& t) { return t.phi; })};
}

struct ExactExpectations {
    double tv = 0.0;
    double missing = 0.0;
    std::uint64_t outcomes = 0;
    bool pointwise_two_tv_ge_missing = true;
};

/// E[TV] and E[U] by enumerating every ordered outcome in support^m (at most 10^7).
inline ExactExpectations exact_expectations(const Distribution& mu, std::uint64_t m) {
    detail::require_proper(mu, "exact_expectations");
    detail::require(m >= 1, "m must be positive");
    const std::size_t s = mu.support_size();
    double space = std::pow(static_cast<double>(s), static_cast<double>(m));
    if (space > 1e7) throw GuardError("exact enumeration over " + detail::fmt_num(space) + " outcomes is too large");
    ExactExpectations r;
    std::vector<std::size_t> pos(m, 0);
    std::vector<Index> draws(m);
    const auto atoms = mu.atoms();
    for (;;) {
        double prob = 1.0;
        for (std::size_t t = 0; t < m; ++t) {
            prob *= atoms[pos[t]].mass;
            draws[t] = atoms[pos[t]].index;
        }
        const auto e = empirical_measure(draws);
        const double tv = tv_distance(e.base(), mu);
        const double u = missing_mass(mu, e);
        r.tv += prob * tv;
        r.missing += prob * u;
        r.pointwise_two_tv_ge_missing = r.pointwise_two_tv_ge_missing && 2.0 * tv >= u;
        ++r.outcomes;
        std::size_t t = 0;
        while (t < m && ++pos[t] == s) pos[t++] = 0;
        if (t == m) break;
    }
    return r;
}

/// |phi(after) - phi(before)| when draw `position` is replaced by `symbol`.
inline double phi_swap_delta(std::span<const Index> draws, std::size_t position, Index symbol) {
    detail::require(position < draws.size(), "swap position out of range");
    std::vector<Index> swapped(draws.begin(), draws.end());
    swapped[position] = symbol;
    return std::abs(phi(empirical_measure(swapped)) - phi(empirical_measure(draws)));
}

}  // namespace tvbound
