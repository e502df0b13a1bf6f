// dist_core.hpp
//
// Sparse (possibly deficient) distributions over the positive integers and
// the functionals used throughout the library: total variation, the
// half-norm (sum sqrt)^2, the minus-half-norm of the positive part,
// decreasing rearrangement, tail truncation and KL divergence.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tvbound/errors.hpp"

namespace tvbound {

using Index = std::uint64_t;

struct Atom {
    Index index = 1;
    double mass = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/**
 * A nonnegative vector over {1, 2, 3, ...} with total mass at most one.
 *
 * Only atoms of strictly positive mass are stored, sorted by index, with no
 * duplicates. Deficient objects (total < 1) are allowed; `is_proper()`
 * reports whether the total is one within kMassTolerance.
 */
class Distribution {
public:
    static constexpr double kMassTolerance = 1e-9;

    Distribution() = default;

    /// Validates and canonicalizes: sorts by index, drops zero masses.
    explicit Distribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        for (const auto& a : atoms_) {
            detail::require(a.index >= 1, "atom index must be a positive integer");
            detail::require(std::isfinite(a.mass) && a.mass >= 0.0 && a.mass <= 1.0 + kMassTolerance,
                            "atom mass must lie in [0,1], got " + std::to_string(a.mass) + " at index " +
                                std::to_string(a.index));
        }
        std::erase_if(atoms_, [](const Atom& a) { return a.mass == 0.0; });
        std::stable_sort(atoms_.begin(), atoms_.end(),
                         [](const Atom& a, const Atom& b) { return a.index < b.index; });
        for (std::size_t i = 1; i < atoms_.size(); ++i) {
            detail::require(atoms_[i - 1].index != atoms_[i].index,
                            "duplicate atom index " + std::to_string(atoms_[i].index));
        }
        for (const auto& a : atoms_) total_ += a.mass;
        detail::require(total_ <= 1.0 + kMassTolerance,
                        "total mass exceeds 1: " + std::to_string(total_));
    }

    /// Masses for indices 1..n in order; zero entries are allowed and dropped.
    static Distribution from_masses(std::span<const double> masses) {
        std::vector<Atom> atoms;
        atoms.reserve(masses.size());
        for (std::size_t i = 0; i < masses.size(); ++i) atoms.push_back({static_cast<Index>(i + 1), masses[i]});
        return Distribution(std::move(atoms));
    }

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t support_size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }
    double total_mass() const noexcept { return total_; }
    bool is_proper() const noexcept { return std::abs(total_ - 1.0) <= kMassTolerance; }
    Index max_index() const noexcept { return atoms_.empty() ? 0 : atoms_.back().index; }

    double mass_at(Index i) const noexcept {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), i,
                                   [](const Atom& a, Index v) { return a.index < v; });
        return (it != atoms_.end() && it->index == i) ? it->mass : 0.0;
    }

    friend bool operator==(const Distribution& a, const Distribution& b) { return a.atoms_ == b.atoms_; }

private:
    std::vector<Atom> atoms_;
    double total_ = 0.0;
};

struct TruncationSpec {
    double eta = 0.0;
    std::size_t threshold_rank = 0;
};

namespace detail {

inline void require_proper(const Distribution& d, const char* what) {
    require(d.is_proper(), std::string(what) + " requires a proper distribution (total mass " +
                               std::to_string(d.total_mass()) + ")");
}

// Calls f(mass_a, mass_b) for every index in the union of supports, in index order.
template <class F>
void merge_walk(const Distribution& a, const Distribution& b, F&& f) {
    auto ia = a.atoms().begin(), ea = a.atoms().end();
    auto ib = b.atoms().begin(), eb = b.atoms().end();
    while (ia != ea || ib != eb) {
        if (ib == eb || (ia != ea && ia->index < ib->index)) {
            f(ia->mass, 0.0);
            ++ia;
        } else if (ia == ea || ib->index < ia->index) {
            f(0.0, ib->mass);
            ++ib;
        } else {
            f(ia->mass, ib->mass);
            ++ia;
            ++ib;
        }
    }
}

}  // namespace detail

/// Half the l1 distance over the union of supports.
inline double tv_distance(const Distribution& a, const Distribution& b) {
    double sum = 0.0;
    detail::merge_walk(a, b, [&](double x, double y) { sum += std::abs(x - y); });
    return 0.5 * sum;
}

/// (sum_i sqrt d(i))^2
inline double half_norm(const Distribution& d) {
    double s = 0.0;
    for (const auto& a : d.atoms()) s += std::sqrt(a.mass);
    return s * s;
}

/// sum over the support of 1/sqrt d(i)
inline double minus_half_norm_positive(const Distribution& d) {
    double s = 0.0;
    for (const auto& a : d.atoms()) s += 1.0 / std::sqrt(a.mass);
    return s;
}

/// Atoms sorted by non-increasing mass; equal masses keep increasing index order.
inline std::vector<Atom> decreasing_masses(const Distribution& d) {
    std::vector<Atom> out(d.atoms().begin(), d.atoms().end());
    std::stable_sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) { return a.mass > b.mass; });
    return out;
}

/**
 * Least rank t >= 1 such that the mass strictly after rank t in the
 * decreasing rearrangement is below eta.
 */
inline TruncationSpec truncation_rank(const Distribution& d, double eta) {
    detail::require(eta > 0.0 && eta < 1.0, "eta must lie in (0,1), got " + std::to_string(eta));
    detail::require(!d.empty(), "truncation of an empty distribution is undefined");
    const auto sorted = decreasing_masses(d);
    const std::size_t n = sorted.size();
    // tail[t] = sum of ranks t+1..n, accumulated from the light end.
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t t = n; t-- > 0;) tail[t] = tail[t + 1] + sorted[t].mass;
    std::size_t t = 1;
    while (t < n && !(tail[t] < eta)) ++t;
    return {eta, t};
}

/// Keeps the atoms of decreasing rank <= T(eta); the result is deficient in general.
inline Distribution truncate(const Distribution& d, double eta) {
    const auto spec = truncation_rank(d, eta);
    auto sorted = decreasing_masses(d);
    sorted.resize(spec.threshold_rank);
    return Distribution(std::move(sorted));
}

/// KL(p || q) in nats; +infinity when p is not absolutely continuous w.r.t. q.
inline double kl_divergence(const Distribution& p, const Distribution& q) {
    detail::require_proper(p, "kl_divergence");
    detail::require_proper(q, "kl_divergence");
    double sum = 0.0;
    bool infinite = false;
    detail::merge_walk(p, q, [&](double x, double y) {
        if (x == 0.0) return;
        if (y == 0.0) {
            infinite = true;
            return;
        }
        sum += x * std::log(x / y);
    });
    if (infinite) return std::numeric_limits<double>::infinity();
    return std::max(sum, 0.0);
}

}  // namespace tvbound
