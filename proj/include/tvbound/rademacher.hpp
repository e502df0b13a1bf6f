// rademacher.hpp
//
// Empirical Rademacher complexity of the class of all boolean functions on
// the integers, conditional on a sample. The supremum decomposes per symbol:
//
//     m * Rhat = sum_x E[(S_{n_x})_+] = sum_x E|S_{n_x}| / 2,
//
// where S_n is a sum of n fair signs and n_x the multiplicity of symbol x.
// E|S_n| = 2k * C(2k,k) / 4^k with k = ceil(n/2), for both parities of n.
//
// Two evaluation paths for the central binomial term:
//   * k <= 32 (n <= 64): exact 128-bit integers, giving Rhat as a dyadic
//     rational that can be compared for equality with brute force;
//   * otherwise: a Stirling-series form of ln(Gamma(k+1/2)/Gamma(k+1)) written
//     with log1p so the O(1) parts cancel before rounding.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvbound/empirical.hpp"
#include "tvbound/errors.hpp"
#include "tvbound/sampling.hpp"

namespace tvbound {

__extension__ typedef unsigned __int128 u128;

/// Nonnegative rational kept in lowest terms.
struct ExactRational {
    u128 num = 0;
    u128 den = 1;

    static ExactRational make(u128 n, u128 d) {
        detail::require(d != 0, "zero denominator");
        u128 a = n, b = d;
        while (b != 0) {
            const u128 t = a % b;
            a = b;
            b = t;
        }
        if (a == 0) return {0, 1};
        return {n / a, d / a};
    }

    double to_double() const noexcept {
        return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
    }

    friend bool operator==(const ExactRational&, const ExactRational&) = default;
};

inline std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return s;
}

inline std::string to_string(const ExactRational& r) { return to_string(r.num) + "/" + to_string(r.den); }

inline constexpr unsigned kExactCountLimit = 64;

namespace detail {

// C(2k, k) for k = 0..32; C(64,32) < 2^61.
inline constexpr std::array<std::uint64_t, 33> kCentralBinomial = [] {
    std::array<std::uint64_t, 33> t{};
    for (std::uint64_t k = 0; k <= 32; ++k) {
        u128 c = 1;
        for (std::uint64_t i = 1; i <= k; ++i) c = c * (k + i) / i;
        t[k] = static_cast<std::uint64_t>(c);
    }
    return t;
}();

// 1/(12x) - 1/(360x^3) + 1/(1260x^5) - 1/(1680x^7): Stirling remainder of ln Gamma.
inline double stirling_tail(double x) noexcept {
    const double r = 1.0 / x, r2 = r * r;
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)));
}

/// ln(C(2k,k) / 4^k) for k >= 1 via Gamma(k+1/2) / (sqrt(pi) Gamma(k+1)).
inline double log_central_ratio(std::uint64_t k) noexcept {
    const double kd = static_cast<double>(k);
    const double bracket = kd * std::log1p(0.5 / kd) - (kd + 0.5) * std::log1p(1.0 / kd) + 0.5;
    return -0.5 * std::log(std::numbers::pi) - 0.5 * std::log(kd) + bracket + stirling_tail(kd + 0.5) -
           stirling_tail(kd + 1.0);
}

/// Log-space evaluation, valid for every n >= 1 but used only above the exact range.
inline double heads_minus_tails_mean_asymptotic(std::uint64_t n) noexcept {
    const std::uint64_t k = (n + 1) / 2;
    return 2.0 * static_cast<double>(k) * std::exp(log_central_ratio(k));
}

}  // namespace detail

/// E|sigma_1 + ... + sigma_n| for fair signs.
inline double heads_minus_tails_mean(std::uint64_t n) {
    detail::require(n >= 1, "heads_minus_tails_mean needs n >= 1");
    if (n > kExactCountLimit) return detail::heads_minus_tails_mean_asymptotic(n);
    const std::uint64_t k = (n + 1) / 2;
    const u128 numer = static_cast<u128>(2 * k) * detail::kCentralBinomial[k];
    return std::ldexp(static_cast<double>(static_cast<long double>(numer)), -static_cast<int>(2 * k));
}

/// Rhat as an exact rational; every count must be <= 64.
inline ExactRational empirical_rademacher_exact_rational(const EmpiricalMeasure& e) {
    const std::uint64_t max_count = e.max_count();
    detail::require(max_count <= kExactCountLimit, "exact rational path needs every count <= 64");
    // Each symbol contributes k C(2k,k) / 2^(2k); put all on the denominator 2^(2K).
    const unsigned big_k = static_cast<unsigned>((max_count + 1) / 2);
    u128 num = 0;
    for (const auto& c : e.counts()) {
        const std::uint64_t k = (c.count + 1) / 2;
        num += (static_cast<u128>(k) * detail::kCentralBinomial[k]) << (2 * (big_k - k));
    }
    return ExactRational::make(num, static_cast<u128>(e.m()) << (2 * big_k));
}

/// Rhat = (1/m) sum_x E|S_{n_x}| / 2. Exact rational path whenever max count <= 64.
inline double empirical_rademacher_exact(const EmpiricalMeasure& e) {
    if (e.max_count() <= kExactCountLimit) return empirical_rademacher_exact_rational(e).to_double();
    double s = 0.0;
    for (const auto& c : e.counts()) s += 0.5 * heads_minus_tails_mean(c.count);
    return s / static_cast<double>(e.m());
}

inline constexpr std::size_t kBruteForceLimit = 24;

/**
 * Test oracle: averages sup_f (1/m) sum_t sigma_t f(X_t) over all 2^m sign
 * vectors, taking the supremum per symbol as the positive part of that
 * symbol's signed count. Sign vectors are visited in Gray-code order so
 * each step flips one sign. Exact.
 */
inline ExactRational empirical_rademacher_bruteforce_rational(std::span<const Index> draws) {
    const std::size_t m = draws.size();
    detail::require(m >= 1, "empty sample");
    if (m > kBruteForceLimit)
        throw GuardError("brute-force Rademacher enumeration is capped at m = 24, got m = " + std::to_string(m));
    std::unordered_map<Index, std::size_t> ids;
    std::vector<std::size_t> symbol(m);
    for (std::size_t t = 0; t < m; ++t) symbol[t] = ids.try_emplace(draws[t], ids.size()).first->second;

    // Start from all signs -1.
    std::vector<std::int64_t> sums(ids.size(), 0);
    for (std::size_t t = 0; t < m; ++t) --sums[symbol[t]];
    std::vector<bool> plus(m, false);
    std::int64_t positive = 0;  // sum_x max(S_x, 0)
    std::uint64_t total = 0;
    const std::uint64_t vectors = std::uint64_t{1} << m;
    for (std::uint64_t i = 0;;) {
        total += static_cast<std::uint64_t>(positive);
        if (++i == vectors) break;
        const auto t = static_cast<std::size_t>(std::countr_zero(i));
        auto& s = sums[symbol[t]];
        positive -= std::max<std::int64_t>(s, 0);
        s += plus[t] ? -2 : 2;
        plus[t] = !plus[t];
        positive += std::max<std::int64_t>(s, 0);
    }
    return ExactRational::make(total, static_cast<u128>(m) << m);
}

inline ExactRational empirical_rademacher_bruteforce_rational(const Sample& s) {
    return empirical_rademacher_bruteforce_rational(s.draws);
}

inline double empirical_rademacher_bruteforce(const Sample& s) {
    return empirical_rademacher_bruteforce_rational(s).to_double();
}

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double x, double rel_tol = 0.0) const noexcept {
        const double slack = rel_tol * std::max({std::abs(lower), std::abs(upper), std::abs(x)});
        return lower - slack <= x && x <= upper + slack;
    }
};

/// (phi / (2 sqrt 2), phi / 2) from the sharp p = 1 Khintchine constants.
inline Interval khintchine_sandwich(const EmpiricalMeasure& e) {
    const double p = phi(e);
    return {p / (2.0 * std::numbers::sqrt2), p / 2.0};
}

/**
 * First-order band sqrt(half_norm / (2 pi m)) -/+ c m^{-3/2} sum_x mhat(x)^{-1/2},
 * with c = 3/2 below and 1 above, both times (2 pi)^{-1/2}.
 */
inline Interval wallis_first_order(const EmpiricalMeasure& e) {
    const double m = static_cast<double>(e.m());
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const double center = std::sqrt(half_norm(e.base()) / m) * inv_sqrt_2pi;
    const double correction = inv_sqrt_2pi * minus_half_norm_positive(e.base()) / (m * std::sqrt(m));
    return {center - 1.5 * correction, center + correction};
}

struct RademacherReport {
    std::uint64_t m = 0;
    double exact = 0.0;
    double khintchine_lower = 0.0;
    double khintchine_upper = 0.0;
    double wallis_lower = 0.0;
    double wallis_upper = 0.0;
};

inline RademacherReport rademacher_report(const EmpiricalMeasure& e) {
    const auto k = khintchine_sandwich(e);
    const auto w = wallis_first_order(e);
    return {e.m(), empirical_rademacher_exact(e), k.lower, k.upper, w.lower, w.upper};
}

}  // namespace tvbound
