// sampling.hpp
//
// Reproducible iid sampling by inverse CDF, plus the standard test families.
//
// Generator contract: std::mt19937_64 (fully specified by the C++ standard),
// seeded with a splitmix64 hash of the caller's seed. Uniform variates are the
// top 53 bits of one 64-bit output scaled by 2^-53, so draws are bit-identical
// on every conforming platform. Independent streams for parallel trials are
// derived from (master_seed, key...) by chained splitmix64 mixing.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tvbound/dist_core.hpp"
#include "tvbound/errors.hpp"

namespace tvbound {

inline constexpr std::string_view kGeneratorIdentity =
    "mt19937_64/splitmix64-seeded/53-bit-uniform/inverse-cdf-index-order";

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of an independent stream keyed by (master, a, b).
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0) noexcept {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() noexcept { return engine_(); }

    /// Uniform integer in [0, n) by rejection; n > 0.
    std::uint64_t below(std::uint64_t n) noexcept {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do x = engine_(); while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

/**
 * Inverse-CDF sampler over a proper distribution. The cumulative mass is
 * built in index order; a variate u*total selects the first atom whose
 * cumulative mass exceeds it.
 */
class Sampler {
public:
    explicit Sampler(const Distribution& d) {
        detail::require(!d.empty(), "cannot sample from an empty distribution");
        detail::require_proper(d, "sampling");
        cumulative_.reserve(d.support_size());
        indices_.reserve(d.support_size());
        double c = 0.0;
        for (const auto& a : d.atoms()) {
            c += a.mass;
            cumulative_.push_back(c);
            indices_.push_back(a.index);
        }
    }

    /// Position (0-based, index order) of the drawn atom.
    std::size_t draw_position(Rng& rng) const noexcept {
        const double u = rng.uniform01() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto pos = static_cast<std::size_t>(it - cumulative_.begin());
        return std::min(pos, cumulative_.size() - 1);
    }

    Index draw(Rng& rng) const noexcept { return indices_[draw_position(rng)]; }

    /// Counts per atom position for m draws; same variates as m calls to draw().
    std::vector<std::uint64_t> draw_counts(std::uint64_t m, Rng& rng) const {
        std::vector<std::uint64_t> counts(cumulative_.size(), 0);
        for (std::uint64_t t = 0; t < m; ++t) ++counts[draw_position(rng)];
        return counts;
    }

    std::span<const Index> indices() const noexcept { return indices_; }

private:
    std::vector<double> cumulative_;
    std::vector<Index> indices_;
};

struct Sample {
    std::vector<Index> draws;
    std::uint64_t master_seed = 0;
    std::string source_label;

    std::size_t size() const noexcept { return draws.size(); }
    friend bool operator==(const Sample&, const Sample&) = default;
};

inline Sample draw_iid(const Distribution& d, std::uint64_t m, std::uint64_t seed, std::string label = {}) {
    detail::require(m >= 1, "sample size m must be at least 1");
    const Sampler sampler(d);
    Rng rng(seed);
    Sample s{{}, seed, std::move(label)};
    s.draws.reserve(m);
    for (std::uint64_t t = 0; t < m; ++t) s.draws.push_back(sampler.draw(rng));
    return s;
}

// ---------------------------------------------------------------------------
// Standard families

struct UniformFamily { std::uint64_t d; };
struct TwoPointFamily { double epsilon; };
struct GeometricFamily { double p; std::uint64_t cutoff; };
struct ZipfFamily { double s; std::uint64_t cutoff; };
struct PointMassFamily { Index i; };

using FamilySpec = std::variant<UniformFamily, TwoPointFamily, GeometricFamily, ZipfFamily, PointMassFamily>;

namespace detail {

inline std::string fmt_num(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline Distribution normalized(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> masses(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) masses[i] = weights[i] / total;
    return Distribution::from_masses(masses);
}

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

/// Canonical text form, e.g. "zipf(2,100)"; parse_family accepts it back.
inline std::string to_string(const FamilySpec& f) {
    using detail::fmt_num;
    return std::visit(detail::overloaded{
                          [](const UniformFamily& u) { return "uniform(" + std::to_string(u.d) + ")"; },
                          [](const TwoPointFamily& t) { return "two_point(" + fmt_num(t.epsilon) + ")"; },
                          [](const GeometricFamily& g) {
                              return "geometric(" + fmt_num(g.p) + "," + std::to_string(g.cutoff) + ")";
                          },
                          [](const ZipfFamily& z) { return "zipf(" + fmt_num(z.s) + "," + std::to_string(z.cutoff) + ")"; },
                          [](const PointMassFamily& p) { return "point_mass(" + std::to_string(p.i) + ")"; },
                      },
                      f);
}

/// Builds the proper distribution of a family; infinite families are cut at `cutoff` and renormalized.
inline Distribution make_family(const FamilySpec& f) {
    using detail::require;
    return std::visit(
        detail::overloaded{
            [](const UniformFamily& u) {
                require(u.d >= 1, "uniform(d) needs d >= 1");
                return Distribution::from_masses(std::vector<double>(u.d, 1.0 / static_cast<double>(u.d)));
            },
            [](const TwoPointFamily& t) {
                require(t.epsilon > 0.0 && t.epsilon < 0.5, "two_point(eps) needs eps in (0,1/2)");
                const std::vector<double> m{0.5 - t.epsilon, 0.5 + t.epsilon};
                return Distribution::from_masses(m);
            },
            [](const GeometricFamily& g) {
                require(g.p > 0.0 && g.p < 1.0, "geometric(p,cutoff) needs p in (0,1)");
                require(g.cutoff >= 1, "geometric(p,cutoff) needs cutoff >= 1");
                std::vector<double> w(g.cutoff);
                for (std::uint64_t i = 0; i < g.cutoff; ++i) w[i] = g.p * std::pow(1.0 - g.p, static_cast<double>(i));
                return detail::normalized(w);
            },
            [](const ZipfFamily& z) {
                require(z.s > 1.0, "zipf(s,cutoff) needs s > 1");
                require(z.cutoff >= 1, "zipf(s,cutoff) needs cutoff >= 1");
                std::vector<double> w(z.cutoff);
                for (std::uint64_t i = 0; i < z.cutoff; ++i) w[i] = std::pow(static_cast<double>(i + 1), -z.s);
                return detail::normalized(w);
            },
            [](const PointMassFamily& p) {
                require(p.i >= 1, "point_mass(i) needs i >= 1");
                return Distribution({{p.i, 1.0}});
            },
        },
        f);
}

/**
 * Parses "name(a,b)" or "name:a,b" for the names uniform, two_point,
 * geometric, zipf, point_mass.
 */
inline FamilySpec parse_family(std::string_view text) {
    auto fail = [&](const std::string& why) -> ParameterError {
        return ParameterError("bad family spec '" + std::string(text) + "': " + why);
    };
    std::string_view name, args;
    if (auto open = text.find('('); open != std::string_view::npos) {
        if (text.back() != ')') throw fail("missing ')'");
        name = text.substr(0, open);
        args = text.substr(open + 1, text.size() - open - 2);
    } else if (auto colon = text.find(':'); colon != std::string_view::npos) {
        name = text.substr(0, colon);
        args = text.substr(colon + 1);
    } else {
        throw fail("expected name(args)");
    }
    std::vector<std::string> parts;
    for (std::size_t start = 0; start <= args.size();) {
        auto comma = args.find(',', start);
        if (comma == std::string_view::npos) comma = args.size();
        std::string part(args.substr(start, comma - start));
        std::erase(part, ' ');
        parts.push_back(part);
        start = comma + 1;
    }
    auto want = [&](std::size_t n) {
        if (parts.size() != n) throw fail("expected " + std::to_string(n) + " argument(s)");
    };
    auto real = [&](std::size_t i) {
        double v{};
        const auto& s = parts[i];
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) throw fail("'" + s + "' is not a number");
        return v;
    };
    auto integer = [&](std::size_t i) {
        std::uint64_t v{};
        const auto& s = parts[i];
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) throw fail("'" + s + "' is not a nonnegative integer");
        return v;
    };
    FamilySpec f;
    if (name == "uniform") {
        want(1);
        f = UniformFamily{integer(0)};
    } else if (name == "two_point") {
        want(1);
        f = TwoPointFamily{real(0)};
    } else if (name == "geometric") {
        want(2);
        f = GeometricFamily{real(0), integer(1)};
    } else if (name == "zipf") {
        want(2);
        f = ZipfFamily{real(0), integer(1)};
    } else if (name == "point_mass") {
        want(1);
        f = PointMassFamily{integer(0)};
    } else {
        throw fail("unknown family '" + std::string(name) + "'");
    }
    make_family(f);  // validates parameters
    return f;
}

}  // namespace tvbound
