// io.hpp
//
// JSON and CSV forms of every report, the sample file format, and experiment
// config parsing. Doubles are written in shortest round-trip form, so every
// value reads back bit-exactly.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "tvbound/conf_bounds.hpp"
#include "tvbound/dist_core.hpp"
#include "tvbound/empirical.hpp"
#include "tvbound/errors.hpp"
#include "tvbound/experiment.hpp"
#include "tvbound/minimax_lab.hpp"
#include "tvbound/oracle_bounds.hpp"
#include "tvbound/rademacher.hpp"
#include "tvbound/sampling.hpp"

namespace tvbound {

using json = nlohmann::json;

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (std::size_t start = 0;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string csv_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string fmt_u(std::uint64_t v) { return std::to_string(v); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Distribution

inline json to_json(const Distribution& d) {
    json atoms = json::array();
    for (const auto& a : d.atoms()) atoms.push_back({a.index, a.mass});
    return {{"atoms", atoms}};
}

inline Distribution distribution_from_json(const json& j) {
    try {
        std::vector<Atom> atoms;
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 2) throw ParseError("each atom must be [index, mass]", 0);
            atoms.push_back({a[0].get<Index>(), a[1].get<double>()});
        }
        return Distribution(std::move(atoms));
    } catch (const json::exception& e) {
        throw ParseError(std::string("distribution JSON: ") + e.what(), 0);
    }
}

inline std::string to_csv(const Distribution& d) {
    std::string out = "index,mass\n";
    for (const auto& a : d.atoms()) out += detail::fmt_u(a.index) + "," + detail::fmt_num(a.mass) + "\n";
    return out;
}

inline Distribution distribution_from_csv(std::istream& in) {
    std::vector<Atom> atoms;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const auto t = detail::trim(line);
        if (t.empty() || (n == 1 && t == "index,mass")) continue;
        const auto f = detail::split(t, ',');
        Atom a{};
        if (f.size() != 2 || !detail::parse_number(f[0], a.index) || !detail::parse_number(f[1], a.mass))
            throw ParseError("expected 'index,mass', got '" + std::string(t) + "'", n);
        atoms.push_back(a);
    }
    try {
        return Distribution(std::move(atoms));
    } catch (const ParameterError& e) {
        throw ParseError(e.what(), 0);
    }
}

// ---------------------------------------------------------------------------
// Samples: optional "# seed=<u64> source=<label>" header, then one draw per line

inline void write_sample(std::ostream& out, const Sample& s) {
    out << "# seed=" << s.master_seed << " source=" << s.source_label << '\n';
    for (Index x : s.draws) out << x << '\n';
}

inline Sample read_sample(std::istream& in) {
    Sample s;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            if (n != 1) continue;
            std::istringstream header{std::string(t.substr(1))};
            for (std::string field; header >> field;) {
                if (field.starts_with("seed=")) {
                    if (!detail::parse_number(std::string_view(field).substr(5), s.master_seed))
                        throw ParseError("bad seed in header: '" + field + "'", n);
                } else if (field.starts_with("source=")) {
                    s.source_label = field.substr(7);
                }
            }
            continue;
        }
        Index x = 0;
        if (!detail::parse_number(t, x)) throw ParseError("expected a positive integer, got '" + std::string(t) + "'", n);
        if (x == 0) throw ParseError("symbol indices start at 1", n);
        s.draws.push_back(x);
    }
    if (s.draws.empty()) throw ParseError("sample contains no draws", 0);
    return s;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const EmpiricalMeasure& e) {
    json j = to_json(e.base());
    j["m"] = e.m();
    return j;
}

inline std::string to_csv(const EmpiricalMeasure& e) { return to_csv(e.base()); }

inline json to_json(const LambdaReport& r) {
    return {{"m", r.m},
            {"small_atom_mass", r.small_atom_mass},
            {"large_atom_term", r.large_atom_term},
            {"lambda", r.lambda}};
}

inline constexpr std::string_view kLambdaCsvHeader = "m,small_atom_mass,large_atom_term,lambda";

inline std::string to_csv_row(const LambdaReport& r) {
    return detail::fmt_u(r.m) + "," + detail::fmt_num(r.small_atom_mass) + "," + detail::fmt_num(r.large_atom_term) +
           "," + detail::fmt_num(r.lambda);
}

inline json to_json(const RademacherReport& r) {
    return {{"m", r.m},
            {"exact", r.exact},
            {"khintchine_lower", r.khintchine_lower},
            {"khintchine_upper", r.khintchine_upper},
            {"wallis_lower", r.wallis_lower},
            {"wallis_upper", r.wallis_upper}};
}

inline constexpr std::string_view kRademacherCsvHeader =
    "m,exact,khintchine_lower,khintchine_upper,wallis_lower,wallis_upper";

inline std::string to_csv_row(const RademacherReport& r) {
    return detail::fmt_u(r.m) + "," + detail::fmt_num(r.exact) + "," + detail::fmt_num(r.khintchine_lower) + "," +
           detail::fmt_num(r.khintchine_upper) + "," + detail::fmt_num(r.wallis_lower) + "," +
           detail::fmt_num(r.wallis_upper);
}

inline json to_json(const BoundReport& r) {
    return {{"kind", std::string(to_string(r.kind))},
            {"m", r.m},
            {"delta", r.delta},
            {"statistic", r.statistic},
            {"bound_value", r.bound_value},
            {"vacuous", r.vacuous}};
}

inline constexpr std::string_view kBoundCsvHeader = "kind,m,delta,statistic,bound_value,vacuous";

inline std::string to_csv_row(const BoundReport& r) {
    return std::string(to_string(r.kind)) + "," + detail::fmt_u(r.m) + "," + detail::fmt_num(r.delta) + "," +
           detail::fmt_num(r.statistic) + "," + detail::fmt_num(r.bound_value) + "," +
           (r.vacuous ? "true" : "false");
}

inline std::string codeword_bits(const Codeword& c) {
    std::string s;
    for (auto b : c) s += b ? '1' : '0';
    return s;
}

inline json to_json(const PackingFamily& f) {
    json members = json::array();
    for (const auto& mem : f.members)
        members.push_back({{"codeword", codeword_bits(mem.codeword)}, {"distribution", to_json(mem.distribution)}});
    return {{"d", f.d},
            {"epsilon", f.epsilon},
            {"seed", f.seed},
            {"target_size", f.target_size},
            {"size", f.members.size()},
            {"candidates_tested", f.candidates_tested},
            {"max_kl_ratio", f.max_kl_ratio},
            {"members", members}};
}

inline json to_json(const PackingCheck& c) {
    return {{"size_exceeds_target", c.size_exceeds_target},
            {"has_zero_codeword", c.has_zero_codeword},
            {"all_proper", c.all_proper},
            {"min_pairwise_tv", c.min_pairwise_tv},
            {"max_identity_error", c.max_identity_error},
            {"max_half_norm", c.max_half_norm}};
}

inline constexpr std::string_view kRiskCsvHeader = "member_id,trials,failures,risk_hat,se";

inline std::string to_csv(const MinimaxRiskReport& r) {
    std::string out = std::string(kRiskCsvHeader) + "\n";
    for (const auto& mr : r.members)
        out += detail::fmt_u(mr.member_id) + "," + detail::fmt_u(mr.trials) + "," + detail::fmt_u(mr.failures) + "," +
               detail::fmt_num(mr.risk_hat) + "," + detail::fmt_num(mr.se) + "\n";
    return out;
}

inline json to_json(const MinimaxRiskReport& r) {
    return {{"m", r.m}, {"seed", r.seed}, {"members", r.members.size()}, {"max_risk", r.max_risk},
            {"max_risk_se", r.max_risk_se}, {"argmax", r.argmax}};
}

inline json to_json(const MeanSe& s) { return {{"mean", s.mean}, {"se", s.se}}; }

inline json to_json(const ConvergenceCurve& c) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back({{"m", p.m}, {"phi", to_json(p.phi)}, {"tv", to_json(p.tv)}});
    return {{"points", pts}, {"endpoint_decrease", c.endpoint_decrease}};
}

// ---------------------------------------------------------------------------
// Experiment config and results

inline json to_json(const ExperimentConfig& c) {
    json kinds = json::array();
    for (auto k : c.bounds_enabled) kinds.push_back(std::string(to_string(k)));
    json outputs = json::object();
    if (!c.json_path.empty()) outputs["json"] = c.json_path;
    if (!c.csv_path.empty()) outputs["csv"] = c.csv_path;
    return {{"family", to_string(c.family)},
            {"m_values", c.m_values},
            {"delta_values", c.delta_values},
            {"trials", c.trials},
            {"master_seed", c.master_seed},
            {"bounds_enabled", kinds},
            {"threads", c.threads},
            {"outputs", outputs},
            {"debug_bound_scale", c.debug_bound_scale}};
}

/**
 * Reads a config object, collecting every problem (unknown keys, wrong types,
 * and failed invariants) before throwing a single ConfigError.
 */
inline ExperimentConfig config_from_json(const json& j) {
    std::vector<std::string> v;
    ExperimentConfig c;
    if (!j.is_object()) throw ConfigError({"config must be a JSON object"});
    static const std::vector<std::string> known = {"family",         "m_values", "delta_values", "trials",
                                                   "master_seed",    "bounds_enabled", "threads", "outputs",
                                                   "debug_bound_scale"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) v.push_back("unknown key '" + key + "'");

    auto field = [&](const char* key, bool required, auto&& read) {
        if (!j.contains(key)) {
            if (required) v.push_back(std::string("missing required key '") + key + "'");
            return;
        }
        try {
            read(j.at(key));
        } catch (const json::exception&) {
            v.push_back(std::string("key '") + key + "' has the wrong type");
        } catch (const std::exception& e) {
            v.push_back(std::string(key) + ": " + e.what());
        }
    };
    field("family", true, [&](const json& x) { c.family = parse_family(x.get<std::string>()); });
    field("m_values", true, [&](const json& x) {
        c.m_values.clear();
        for (const auto& e : x) {
            if (!e.is_number_integer() || e.get<std::int64_t>() < 1)
                throw ParameterError("entries must be positive integers");
            c.m_values.push_back(e.get<std::uint64_t>());
        }
    });
    field("delta_values", true, [&](const json& x) { c.delta_values = x.get<std::vector<double>>(); });
    field("trials", false, [&](const json& x) {
        if (!x.is_number_integer() || x.get<std::int64_t>() < 0) throw ParameterError("must be a nonnegative integer");
        c.trials = x.get<std::uint64_t>();
    });
    field("master_seed", true, [&](const json& x) {
        if (!x.is_number_unsigned()) throw ParameterError("must be a nonnegative integer");
        c.master_seed = x.get<std::uint64_t>();
    });
    field("bounds_enabled", false, [&](const json& x) {
        c.bounds_enabled.clear();
        for (const auto& e : x) c.bounds_enabled.push_back(parse_bound_kind(e.get<std::string>()));
    });
    field("threads", false, [&](const json& x) {
        if (!x.is_number_unsigned()) throw ParameterError("must be a nonnegative integer");
        c.threads = x.get<unsigned>();
    });
    field("outputs", false, [&](const json& x) {
        for (const auto& [key, val] : x.items()) {
            if (key == "json") c.json_path = val.get<std::string>();
            else if (key == "csv") c.csv_path = val.get<std::string>();
            else throw ParameterError("unknown output '" + key + "'");
        }
    });
    field("debug_bound_scale", false, [&](const json& x) { c.debug_bound_scale = x.get<double>(); });

    for (auto& s : validate(c)) v.push_back(std::move(s));
    if (!v.empty()) throw ConfigError(std::move(v));
    return c;
}

inline ExperimentConfig config_from_stream(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
    }
    return config_from_json(j);
}

/// Everything except wall-clock time, which would break byte-level replay.
inline json to_json(const ExperimentResult& r, bool include_wall_clock = true) {
    json cov = json::array();
    for (const auto& c : r.coverage)
        cov.push_back({{"m", c.m},
                       {"delta", c.delta},
                       {"kind", std::string(to_string(c.kind))},
                       {"trials", c.trials},
                       {"covered", c.covered},
                       {"coverage_hat", c.coverage_hat},
                       {"se", c.se},
                       {"threshold", c.threshold},
                       {"mean_bound", c.mean_bound},
                       {"passed", c.passed}});
    json mom = json::array();
    for (const auto& m : r.moments) {
        json row = {{"m", m.m},
                    {"tv", to_json(m.tv)},
                    {"phi", to_json(m.phi)},
                    {"missing_mass", to_json(m.missing_mass)},
                    {"rademacher", to_json(m.rademacher)},
                    {"lambda", to_json(m.lambda)},
                    {"expected_phi_upper", m.expected_phi_upper}};
        if (m.bk) row["bk_sandwich"] = {{"lower", m.bk->lower}, {"upper", m.bk->upper}, {"vacuous", m.bk->vacuous}};
        mom.push_back(row);
    }
    json aud = json::array();
    for (const auto& a : r.audits)
        aud.push_back({{"name", a.name}, {"m", a.m}, {"lhs", a.lhs}, {"rhs", a.rhs}, {"passed", a.passed}});
    json j = {{"config", to_json(r.config)},
              {"family", r.family_label},
              {"generator", r.generator},
              {"master_seed", r.config.master_seed},
              {"sigma_multiplier", r.sigma_multiplier},
              {"all_passed", r.all_passed()},
              {"coverage", cov},
              {"moments", mom},
              {"audits", aud}};
    if (include_wall_clock) j["wall_clock_seconds"] = r.wall_clock_seconds;
    return j;
}

inline constexpr std::string_view kExperimentCsvHeader = "family,m,delta,kind,metric,value,se";

/// Long-form CSV; rows that do not depend on delta or kind leave those fields empty.
inline std::string to_csv(const ExperimentResult& r) {
    const std::string fam = detail::csv_quote(r.family_label);
    std::string out = std::string(kExperimentCsvHeader) + "\n";
    auto row = [&](std::uint64_t m, const std::string& delta, std::string_view kind, std::string_view metric,
                   double value, double se) {
        out += fam + "," + detail::fmt_u(m) + "," + delta + "," + std::string(kind) + "," + std::string(metric) + "," +
               detail::fmt_num(value) + "," + detail::fmt_num(se) + "\n";
    };
    for (const auto& c : r.coverage) {
        const auto delta = detail::fmt_num(c.delta);
        const auto kind = to_string(c.kind);
        row(c.m, delta, kind, "coverage", c.coverage_hat, c.se);
        row(c.m, delta, kind, "coverage_threshold", c.threshold, 0.0);
        row(c.m, delta, kind, "mean_bound", c.mean_bound, 0.0);
    }
    for (const auto& m : r.moments) {
        row(m.m, "", "", "mean_tv", m.tv.mean, m.tv.se);
        row(m.m, "", "", "mean_phi", m.phi.mean, m.phi.se);
        row(m.m, "", "", "mean_missing_mass", m.missing_mass.mean, m.missing_mass.se);
        row(m.m, "", "", "mean_rademacher", m.rademacher.mean, m.rademacher.se);
        row(m.m, "", "", "lambda", m.lambda.lambda, 0.0);
        row(m.m, "", "", "expected_phi_upper", m.expected_phi_upper, 0.0);
        if (m.bk) {
            row(m.m, "", "", "bk_lower", m.bk->lower, 0.0);
            row(m.m, "", "", "bk_upper", m.bk->upper, 0.0);
        }
    }
    return out;
}

}  // namespace tvbound
