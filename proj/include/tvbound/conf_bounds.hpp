// conf_bounds.hpp
//
// Fully empirical high-probability bounds on TV(mhat, mu). Each bound holds
// marginally at its own delta; no union bound is taken across kinds.
//
//   phi upper:          phi + 3 sqrt(ln(2/delta) / (2m))
//   phi lower:          phi / (4 sqrt 2) - 3 sqrt(ln(2/delta) / m)
//   rademacher upper:   2 Rhat + 3 sqrt(ln(2/delta) / (2m))
//   rademacher lower:   Rhat / 2 - 3 sqrt(ln(2/delta) / m)
//   refined lower:      Rhat / 2 - 1/(4 sqrt m) - (3/2) sqrt(ln(2/delta) / (2m))
//
// Lower bounds are reported unclamped and flagged vacuous when negative.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "tvbound/empirical.hpp"
#include "tvbound/errors.hpp"
#include "tvbound/rademacher.hpp"

namespace tvbound {

enum class BoundKind {
    PhiUpper,
    PhiLower,
    RademacherUpper,
    RademacherLower,
    RademacherLowerRefined,
};

inline constexpr std::array<BoundKind, 5> kAllBoundKinds = {
    BoundKind::PhiUpper, BoundKind::PhiLower, BoundKind::RademacherUpper, BoundKind::RademacherLower,
    BoundKind::RademacherLowerRefined};

/// Wire names used in JSON/CSV reports and on the command line.
inline constexpr std::string_view to_string(BoundKind k) noexcept {
    switch (k) {
        case BoundKind::PhiUpper: return "thm1_upper";
        case BoundKind::PhiLower: return "thm2_lower";
        case BoundKind::RademacherUpper: return "lemma31_upper";
        case BoundKind::RademacherLower: return "lemma33_lower";
        case BoundKind::RademacherLowerRefined: return "remark_lower";
    }
    return "unknown";
}

/// Accepts the wire names and their short forms (thm1, thm2, lemma31, lemma33, remark).
inline BoundKind parse_bound_kind(std::string_view s) {
    for (auto k : kAllBoundKinds) {
        const auto name = to_string(k);
        if (s == name || s == name.substr(0, name.find('_'))) return k;
    }
    throw ParameterError("unknown bound kind '" + std::string(s) + "'");
}

inline constexpr bool is_upper(BoundKind k) noexcept {
    return k == BoundKind::PhiUpper || k == BoundKind::RademacherUpper;
}

/// Whether the statistic of a kind is phi (otherwise the exact Rhat).
inline constexpr bool uses_phi(BoundKind k) noexcept {
    return k == BoundKind::PhiUpper || k == BoundKind::PhiLower;
}

struct BoundReport {
    BoundKind kind = BoundKind::PhiUpper;
    std::uint64_t m = 0;
    double delta = 0.0;
    double statistic = 0.0;
    double bound_value = 0.0;
    bool vacuous = false;
};

/// The bound formula alone; BoundReport values are reproduced exactly by this.
inline double evaluate_bound(BoundKind kind, std::uint64_t m, double delta, double statistic) {
    detail::require_delta(delta);
    detail::require(m >= 1, "m must be at least 1");
    const double md = static_cast<double>(m);
    const double log_term = std::log(2.0 / delta);
    switch (kind) {
        case BoundKind::PhiUpper: return statistic + 3.0 * std::sqrt(log_term / (2.0 * md));
        case BoundKind::PhiLower:
            return statistic / (4.0 * std::numbers::sqrt2) - 3.0 * std::sqrt(log_term / md);
        case BoundKind::RademacherUpper: return 2.0 * statistic + 3.0 * std::sqrt(log_term / (2.0 * md));
        case BoundKind::RademacherLower: return 0.5 * statistic - 3.0 * std::sqrt(log_term / md);
        case BoundKind::RademacherLowerRefined:
            return 0.5 * statistic - 1.0 / (4.0 * std::sqrt(md)) - 1.5 * std::sqrt(log_term / (2.0 * md));
    }
    throw ParameterError("unknown bound kind");
}

inline BoundReport make_bound_report(BoundKind kind, std::uint64_t m, double delta, double statistic) {
    const double v = evaluate_bound(kind, m, delta, statistic);
    return {kind, m, delta, statistic, v, !is_upper(kind) && v < 0.0};
}

inline BoundReport phi_upper_bound(const EmpiricalMeasure& e, double delta) {
    return make_bound_report(BoundKind::PhiUpper, e.m(), delta, phi(e));
}

inline BoundReport phi_lower_bound(const EmpiricalMeasure& e, double delta) {
    return make_bound_report(BoundKind::PhiLower, e.m(), delta, phi(e));
}

inline BoundReport rademacher_upper_bound(const RademacherReport& r, double delta) {
    return make_bound_report(BoundKind::RademacherUpper, r.m, delta, r.exact);
}

inline BoundReport rademacher_lower_bound(const RademacherReport& r, double delta) {
    return make_bound_report(BoundKind::RademacherLower, r.m, delta, r.exact);
}

inline BoundReport rademacher_lower_bound_refined(const RademacherReport& r, double delta) {
    return make_bound_report(BoundKind::RademacherLowerRefined, r.m, delta, r.exact);
}

/// Any kind from a sample; Rhat is computed only when the kind needs it.
inline BoundReport compute_bound(BoundKind kind, const EmpiricalMeasure& e, double delta) {
    const double stat = uses_phi(kind) ? phi(e) : empirical_rademacher_exact(e);
    return make_bound_report(kind, e.m(), delta, stat);
}

}  // namespace tvbound
