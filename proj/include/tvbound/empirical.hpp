// empirical.hpp
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tvbound/dist_core.hpp"
#include "tvbound/errors.hpp"
#include "tvbound/sampling.hpp"

namespace tvbound {

struct SymbolCount {
    Index index = 1;
    std::uint64_t count = 0;

    friend bool operator==(const SymbolCount&, const SymbolCount&) = default;
};

/// The MLE of a sample: integer multiplicities plus the induced distribution count/m.
class EmpiricalMeasure {
public:
    /// `counts` must have positive counts and distinct indices; stored in index order.
    explicit EmpiricalMeasure(std::vector<SymbolCount> counts) : counts_(std::move(counts)) {
        detail::require(!counts_.empty(), "empirical measure of an empty sample");
        std::sort(counts_.begin(), counts_.end(),
                  [](const SymbolCount& a, const SymbolCount& b) { return a.index < b.index; });
        std::vector<Atom> atoms;
        atoms.reserve(counts_.size());
        for (const auto& c : counts_) m_ += c.count;
        const double md = static_cast<double>(m_);
        for (const auto& c : counts_) {
            detail::require(c.count > 0, "symbol counts must be positive");
            atoms.push_back({c.index, static_cast<double>(c.count) / md});
        }
        base_ = Distribution(std::move(atoms));
        detail::require(base_.support_size() == counts_.size(), "symbol counts must have distinct indices");
    }

    const Distribution& base() const noexcept { return base_; }
    std::uint64_t m() const noexcept { return m_; }
    std::span<const SymbolCount> counts() const noexcept { return counts_; }
    std::size_t distinct() const noexcept { return counts_.size(); }

    std::uint64_t max_count() const noexcept {
        std::uint64_t mx = 0;
        for (const auto& c : counts_) mx = std::max(mx, c.count);
        return mx;
    }

    friend bool operator==(const EmpiricalMeasure& a, const EmpiricalMeasure& b) { return a.counts_ == b.counts_; }

private:
    std::vector<SymbolCount> counts_;
    std::uint64_t m_ = 0;
    Distribution base_;
};

inline EmpiricalMeasure empirical_measure(std::span<const Index> draws) {
    detail::require(!draws.empty(), "empirical measure of an empty sample");
    std::vector<Index> sorted(draws.begin(), draws.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<SymbolCount> counts;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        counts.push_back({sorted[i], static_cast<std::uint64_t>(j - i)});
        i = j;
    }
    return EmpiricalMeasure(std::move(counts));
}

inline EmpiricalMeasure empirical_measure(const Sample& s) { return empirical_measure(s.draws); }

/// Builds the MLE from per-position counts of a Sampler (zero counts skipped).
inline EmpiricalMeasure empirical_from_positions(std::span<const Index> indices, std::span<const std::uint64_t> counts) {
    std::vector<SymbolCount> out;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] > 0) out.push_back({indices[k], counts[k]});
    return EmpiricalMeasure(std::move(out));
}

/**
 * (1/sqrt m) * sum_j sqrt(mhat(j)), evaluated from integer counts as
 * sum_x sqrt(count_x) / m, which is algebraically identical.
 */
inline double phi(const EmpiricalMeasure& e) {
    double s = 0.0;
    for (const auto& c : e.counts()) s += std::sqrt(static_cast<double>(c.count));
    return s / static_cast<double>(e.m());
}

/// True mass of the symbols never observed. Oracle diagnostic: needs the true distribution.
inline double missing_mass(const Distribution& d, const EmpiricalMeasure& e) {
    detail::require_proper(d, "missing_mass");
    double unseen = 0.0;
    auto it = e.counts().begin();
    const auto end = e.counts().end();
    for (const auto& a : d.atoms()) {
        if (it != end && it->index < a.index)
            throw ParameterError("sample symbol " + std::to_string(it->index) + " is outside the support");
        if (it != end && it->index == a.index) {
            ++it;
        } else {
            unseen += a.mass;
        }
    }
    if (it != end) throw ParameterError("sample symbol " + std::to_string(it->index) + " is outside the support");
    return unseen;
}

inline double missing_mass(const Distribution& d, const Sample& s) { return missing_mass(d, empirical_measure(s)); }

}  // namespace tvbound
