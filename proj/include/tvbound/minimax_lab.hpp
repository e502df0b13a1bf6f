// minimax_lab.hpp
//
// Constructions behind the minimax lower bounds and an empirical probe of the
// matching upper bound for the MLE:
//
//   * the biased-coin pair (1/2, 1/2) vs (1/2 - eps, 1/2 + eps);
//   * a greedy Varshamov-Gilbert packing of the perturbed uniform family
//       mu_sigma(2k-1) = (1 + 16 eps sigma_k)/d,  mu_sigma(2k) = (1 - 16 eps sigma_k)/d;
//   * Monte Carlo risk of the MLE on a packing, and a search for the smallest
//     sample-size constant that suffices on a given distribution.
//
// The universal constant C of the lower/upper bounds is never fixed here; it
// is an input (c_probe, c_grid) or a measured ratio.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvbound/dist_core.hpp"
#include "tvbound/empirical.hpp"
#include "tvbound/errors.hpp"
#include "tvbound/parallel.hpp"
#include "tvbound/sampling.hpp"
#include "tvbound/stats.hpp"

namespace tvbound {

// ---------------------------------------------------------------------------
// Two-point construction

struct LeCamPair {
    Distribution mu0;
    Distribution mu_eps;
    double kl = 0.0;  // KL(mu_eps || mu0)
    double tv = 0.0;
};

inline LeCamPair lecam_pair(double epsilon) {
    detail::require(epsilon > 0.0 && epsilon < 0.5, "epsilon must lie in (0,1/2)");
    LeCamPair p;
    p.mu0 = make_family(UniformFamily{2});
    p.mu_eps = make_family(TwoPointFamily{epsilon});
    p.kl = kl_divergence(p.mu_eps, p.mu0);
    p.tv = tv_distance(p.mu0, p.mu_eps);
    return p;
}

/// floor(ln(1/(2 delta)) / (4 eps^2)): at or below this m the two-point risk is >= delta.
inline std::uint64_t lecam_sample_threshold(double epsilon, double delta) {
    detail::require(epsilon > 0.0 && epsilon < 0.5, "epsilon must lie in (0,1/2)");
    detail::require(delta > 0.0 && delta < 0.5, "delta must lie in (0,1/2)");
    return static_cast<std::uint64_t>(std::floor(std::log(1.0 / (2.0 * delta)) / (4.0 * epsilon * epsilon)));
}

/// (1/2) exp(-m KL), the two-point lower bound on the minimax risk.
inline double lecam_risk_floor(std::uint64_t m, double kl) {
    return 0.5 * std::exp(-static_cast<double>(m) * kl);
}

// ---------------------------------------------------------------------------
// Packing

using Codeword = std::vector<std::uint8_t>;  // one 0/1 entry per atom pair

struct PackingMember {
    Codeword codeword;
    Distribution distribution;
};

struct PackingFamily {
    std::uint64_t d = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::size_t target_size = 0;        // least integer > 2^(d/16)
    std::uint64_t candidates_tested = 0;
    double max_kl_ratio = 0.0;          // max over members of KL(mu_sigma || mu_0) / eps^2
    std::vector<PackingMember> members;
};

inline Distribution packing_distribution(const Codeword& sigma, std::uint64_t d, double epsilon) {
    detail::require(sigma.size() * 2 == d, "codeword length must be d/2");
    const double dd = static_cast<double>(d);
    std::vector<double> masses(d);
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        const double shift = 16.0 * epsilon * (sigma[k] ? 1.0 : 0.0);
        masses[2 * k] = (1.0 + shift) / dd;
        masses[2 * k + 1] = (1.0 - shift) / dd;
    }
    return Distribution::from_masses(masses);
}

inline std::size_t hamming(const Codeword& a, const Codeword& b) {
    std::size_t h = 0;
    for (std::size_t i = 0; i < a.size(); ++i) h += a[i] != b[i];
    return h;
}

/// Absolute slack used when admitting a candidate at pairwise TV >= 2 eps.
inline constexpr double kPackingTvSlack = 1e-12;

namespace detail {

inline void require_packing_params(std::uint64_t d, double epsilon) {
    require(d >= 16 && d % 2 == 0, "packing needs an even d >= 16, got d = " + std::to_string(d));
    require(epsilon > 0.0 && epsilon < 1.0 / 16.0, "packing needs epsilon in (0,1/16)");
}

}  // namespace detail

/**
 * Greedy packing: start from the zero codeword and admit each candidate whose
 * TV to every admitted member is at least 2 eps, until the family has more
 * than 2^(d/16) members. When d/2 <= 20 the candidates are all codewords in
 * integer order starting at an offset chosen by the seed; otherwise they are
 * random codewords. Budget: min(candidate_budget, 2^(d/2) - 1).
 */
inline PackingFamily build_packing(std::uint64_t d, double epsilon, std::uint64_t seed,
                                   std::uint64_t candidate_budget = 1'000'000) {
    detail::require_packing_params(d, epsilon);
    const std::size_t half = d / 2;
    PackingFamily fam;
    fam.d = d;
    fam.epsilon = epsilon;
    fam.seed = seed;
    const double target = std::floor(std::exp2(static_cast<double>(d) / 16.0)) + 1.0;
    fam.target_size = target > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(target);

    Codeword zero(half, 0);
    fam.members.push_back({zero, packing_distribution(zero, d, epsilon)});

    const bool enumerate = half <= 20;
    const std::uint64_t space = enumerate ? (std::uint64_t{1} << half) : 0;
    const std::uint64_t budget = enumerate ? std::min(candidate_budget, space - 1) : candidate_budget;
    Rng rng(seed);
    const std::uint64_t offset = enumerate ? seed % (space - 1) : 0;

    Codeword cand(half);
    for (std::uint64_t i = 0; i < budget && fam.members.size() < fam.target_size; ++i) {
        if (enumerate) {
            const std::uint64_t code = 1 + (offset + i) % (space - 1);  // nonzero codes, each once
            for (std::size_t k = 0; k < half; ++k) cand[k] = static_cast<std::uint8_t>((code >> k) & 1u);
        } else {
            for (std::size_t k = 0; k < half; ++k) cand[k] = static_cast<std::uint8_t>(rng.next_u64() >> 63);
        }
        ++fam.candidates_tested;
        const auto dist = packing_distribution(cand, d, epsilon);
        const bool admissible = std::all_of(fam.members.begin(), fam.members.end(), [&](const PackingMember& mem) {
            return tv_distance(dist, mem.distribution) >= 2.0 * epsilon - kPackingTvSlack;
        });
        if (admissible) fam.members.push_back({cand, dist});
    }
    if (fam.members.size() < fam.target_size) {
        throw ConstructionError("packing reached " + std::to_string(fam.members.size()) + " members, needs " +
                                    std::to_string(fam.target_size) + " (d = " + std::to_string(d) + ")",
                                fam.members.size());
    }
    const auto& base = fam.members.front().distribution;
    for (const auto& mem : fam.members)
        fam.max_kl_ratio = std::max(fam.max_kl_ratio, kl_divergence(mem.distribution, base) / (epsilon * epsilon));
    return fam;
}

/// Measured properties of a family, for audits.
struct PackingCheck {
    bool size_exceeds_target = false;
    bool has_zero_codeword = false;
    bool all_proper = false;
    double min_pairwise_tv = 0.0;
    double max_identity_error = 0.0;  // |TV - (16 eps / d) * Hamming| over all pairs
    double max_half_norm = 0.0;
};

inline PackingCheck check_packing(const PackingFamily& fam) {
    PackingCheck c;
    c.size_exceeds_target = static_cast<double>(fam.members.size()) > std::exp2(static_cast<double>(fam.d) / 16.0);
    c.all_proper = true;
    c.min_pairwise_tv = fam.members.size() > 1 ? 1.0 : 0.0;
    const double scale = 16.0 * fam.epsilon / static_cast<double>(fam.d);
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
        const auto& a = fam.members[i];
        if (std::all_of(a.codeword.begin(), a.codeword.end(), [](auto b) { return b == 0; })) c.has_zero_codeword = true;
        c.all_proper = c.all_proper && a.distribution.is_proper() && a.distribution.max_index() <= fam.d;
        c.max_half_norm = std::max(c.max_half_norm, half_norm(a.distribution));
        for (std::size_t j = i + 1; j < fam.members.size(); ++j) {
            const auto& b = fam.members[j];
            const double tv = tv_distance(a.distribution, b.distribution);
            c.min_pairwise_tv = std::min(c.min_pairwise_tv, tv);
            c.max_identity_error =
                std::max(c.max_identity_error, std::abs(tv - scale * static_cast<double>(hamming(a.codeword, b.codeword))));
        }
    }
    return c;
}

/// (1/2)(1 - c m eps^2 / d), unclamped; c_probe stands in for the unspecified constant.
inline double tsybakov_risk_floor(std::uint64_t d, double epsilon, std::uint64_t m, double c_probe) {
    detail::require(d >= 1, "d must be positive");
    detail::require(c_probe > 0.0, "c_probe must be positive");
    return 0.5 * (1.0 - c_probe * static_cast<double>(m) * epsilon * epsilon / static_cast<double>(d));
}

/// Read-outs a = sqrt(27 C), b = sqrt(3 C / 16) for a probed C. Non-normative.
struct OptimalityConstants {
    double a = 0.0;
    double b = 0.0;
};

inline OptimalityConstants optimality_constants(double c_probe) {
    detail::require(c_probe > 0.0, "c_probe must be positive");
    return {std::sqrt(27.0 * c_probe), std::sqrt(3.0 * c_probe / 16.0)};
}

// ---------------------------------------------------------------------------
// Monte Carlo probes

namespace detail {

/// Fraction of trials in which pred(TV(mhat, mu)) holds; trial t uses stream (seed, key, t).
template <class Pred>
std::uint64_t count_trials(const Distribution& mu, std::uint64_t m, std::uint64_t trials, std::uint64_t seed,
                           std::uint64_t key, unsigned threads, Pred pred) {
    const Sampler sampler(mu);
    std::vector<std::uint8_t> hit(trials, 0);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, key, t));
        const auto counts = sampler.draw_counts(m, rng);
        const auto e = empirical_from_positions(sampler.indices(), counts);
        hit[t] = pred(tv_distance(e.base(), mu)) ? 1 : 0;
    });
    std::uint64_t n = 0;
    for (auto h : hit) n += h;
    return n;
}

}  // namespace detail

struct MemberRisk {
    std::size_t member_id = 0;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double risk_hat = 0.0;
    double se = 0.0;
};

struct MinimaxRiskReport {
    std::uint64_t m = 0;
    std::uint64_t seed = 0;
    std::vector<MemberRisk> members;
    double max_risk = 0.0;
    double max_risk_se = 0.0;
    std::size_t argmax = 0;
};

/// For each member, the fraction of trials with TV(mhat, mu) > eps (MLE only).
inline MinimaxRiskReport empirical_minimax_risk(const PackingFamily& fam, std::uint64_t m, std::uint64_t trials,
                                                std::uint64_t seed, unsigned threads = 0) {
    detail::require(m >= 1 && trials >= 1, "m and trials must be positive");
    MinimaxRiskReport r{m, seed, {}, 0.0, 0.0, 0};
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
        const std::uint64_t fails =
            detail::count_trials(fam.members[i].distribution, m, trials, derive_seed(seed, i), m, threads,
                                 [&](double tv) { return tv > fam.epsilon; });
        const auto p = proportion(fails, trials);
        r.members.push_back({i, trials, fails, p.mean, p.se});
        if (i == 0 || p.mean > r.max_risk) {
            r.max_risk = p.mean;
            r.max_risk_se = p.se;
            r.argmax = i;
        }
    }
    return r;
}

struct SufficiencyEntry {
    double c = 0.0;
    std::uint64_t m = 0;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double success_hat = 0.0;
    double se = 0.0;
    bool suffices = false;
};

struct SufficiencyReport {
    double epsilon = 0.0;
    double delta = 0.0;
    double lambda = 0.0;                 // half-norm of the 2 eps delta / 9 truncation
    double half_norm_eps_over_18 = 0.0;  // the other truncation level, reported for comparison
    double log_inv_delta = 0.0;
    std::vector<SufficiencyEntry> entries;  // grid in ascending order
    std::optional<double> smallest_sufficient_c;
};

/**
 * For each c, m = ceil(c eps^-2 max{Lambda, ln(1/delta)}) and the success rate
 * of TV(mhat, mu) < eps is estimated; the least c with rate >= 1 - delta wins.
 */
inline SufficiencyReport sufficiency_probe(const Distribution& mu, double epsilon, double delta,
                                           std::vector<double> c_grid, std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads = 0) {
    detail::require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
    detail::require_delta(delta);
    detail::require(!c_grid.empty(), "c_grid must be nonempty");
    detail::require(trials >= 1, "trials must be positive");
    for (double c : c_grid) detail::require(c > 0.0, "grid constants must be positive");
    std::sort(c_grid.begin(), c_grid.end());

    SufficiencyReport r;
    r.epsilon = epsilon;
    r.delta = delta;
    r.lambda = half_norm(truncate(mu, 2.0 * epsilon * delta / 9.0));
    r.half_norm_eps_over_18 = half_norm(truncate(mu, epsilon / 18.0));
    r.log_inv_delta = std::log(1.0 / delta);
    const double scale = std::max(r.lambda, r.log_inv_delta) / (epsilon * epsilon);
    for (double c : c_grid) {
        const auto m = static_cast<std::uint64_t>(std::max(1.0, std::ceil(c * scale)));
        const std::uint64_t ok = detail::count_trials(mu, m, trials, seed, m, threads,
                                                      [&](double tv) { return tv < epsilon; });
        const auto p = proportion(ok, trials);
        const bool suffices = p.mean >= 1.0 - delta;
        r.entries.push_back({c, m, trials, ok, p.mean, p.se, suffices});
        if (suffices && !r.smallest_sufficient_c) r.smallest_sufficient_c = c;
    }
    return r;
}

/// TV(mhat, mu) split through the truncation mu[eta] and mhat restricted to its support.
struct TruncationDecomposition {
    double e1 = 0.0;  // TV(mhat, mhat')
    double e2 = 0.0;  // TV(mhat', mu[eta])
    double e3 = 0.0;  // TV(mu[eta], mu)
    double tv = 0.0;  // TV(mhat, mu)
};

inline TruncationDecomposition truncation_decomposition(const Distribution& mu, const EmpiricalMeasure& e, double eta) {
    const Distribution head = truncate(mu, eta);
    std::vector<Atom> kept;
    for (const auto& a : e.base().atoms())
        if (head.mass_at(a.index) > 0.0) kept.push_back(a);
    const Distribution restricted(std::move(kept));
    return {tv_distance(e.base(), restricted), tv_distance(restricted, head), tv_distance(head, mu),
            tv_distance(e.base(), mu)};
}

}  // namespace tvbound
