// oracle_bounds.hpp
//
// Quantities that need the true distribution: the comparator Lambda_m that
// brackets the expected TV risk of the MLE, and the upper bounds on the
// expected/high-probability value of phi. Logarithms are natural.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "tvbound/dist_core.hpp"
#include "tvbound/errors.hpp"

namespace tvbound {

struct LambdaReport {
    std::uint64_t m = 0;
    double small_atom_mass = 0.0;  // sum of masses strictly below 1/m
    double large_atom_term = 0.0;  // (1/(2 sqrt m)) * sum of sqrt(mass) over masses >= 1/m
    double lambda = 0.0;
};

struct BkSandwich {
    double lower = 0.0;
    double upper = 0.0;
    bool vacuous = false;  // lower < 0; reported unclamped
};

/// An atom of mass exactly 1/m goes to the square-root term.
inline LambdaReport lambda_m(const Distribution& d, std::uint64_t m) {
    detail::require_proper(d, "lambda_m");
    detail::require(m >= 1, "m must be at least 1");
    const double md = static_cast<double>(m);
    const double cut = 1.0 / md;
    LambdaReport r{m, 0.0, 0.0, 0.0};
    double roots = 0.0;
    for (const auto& a : d.atoms()) {
        if (a.mass < cut)
            r.small_atom_mass += a.mass;
        else
            roots += std::sqrt(a.mass);
    }
    r.large_atom_term = roots / (2.0 * std::sqrt(md));
    r.lambda = r.small_atom_mass + r.large_atom_term;
    return r;
}

/// (Lambda/4 - 1/(4 sqrt m), Lambda): brackets E[TV(mu, mhat)] for m >= 2.
inline BkSandwich bk_sandwich(const Distribution& d, std::uint64_t m) {
    detail::require(m >= 2, "bk_sandwich needs m >= 2");
    const double lambda = lambda_m(d, m).lambda;
    const double lower = 0.25 * lambda - 1.0 / (4.0 * std::sqrt(static_cast<double>(m)));
    return {lower, lambda, lower < 0.0};
}

/// (1/m) sum_i min{sqrt(m mu_i), m mu_i}; sits between E[phi] and 2 Lambda_m.
inline double expected_phi_upper(const Distribution& d, std::uint64_t m) {
    detail::require_proper(d, "expected_phi_upper");
    detail::require(m >= 1, "m must be at least 1");
    const double md = static_cast<double>(m);
    double s = 0.0;
    for (const auto& a : d.atoms()) {
        const double x = md * a.mass;
        s += std::min(std::sqrt(x), x);
    }
    return s / md;
}

/// 2 Lambda_m + sqrt(ln(1/delta)/m). delta = 1 is accepted (zero penalty).
inline double phi_high_prob_bound(const Distribution& d, std::uint64_t m, double delta) {
    detail::require(delta > 0.0 && delta <= 1.0, "delta must lie in (0,1]");
    return 2.0 * lambda_m(d, m).lambda + std::sqrt(std::log(1.0 / delta) / static_cast<double>(m));
}

}  // namespace tvbound
