// tvbound: command-line front end. JSON on stdout, human summary on stderr.
//
// Exit codes: 0 success, 2 usage/parse/parameter error, 3 statistical
// assertion failure, 4 packing construction failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tvbound/tvbound.hpp"

using namespace tvbound;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitAssertion = 3;
constexpr int kExitConstruction = 4;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<std::uint64_t> parse_m_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(s)) {
        std::uint64_t v = 0;
        if (!detail::parse_number(item, v) || v == 0) throw ParameterError("bad sample size '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ParameterError("--m needs at least one sample size");
    return out;
}

std::vector<BoundKind> parse_kinds(const std::string& s) {
    if (s.empty()) return {kAllBoundKinds.begin(), kAllBoundKinds.end()};
    std::vector<BoundKind> out;
    for (const auto& item : split_list(s)) out.push_back(parse_bound_kind(item));
    return out;
}

Sample load_sample(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sample file '" + path + "'", 0);
    return read_sample(in);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + path + "'");
    out << text;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_bound(const std::string& sample_path, double delta, const std::string& kinds) {
    detail::require_delta(delta);
    const auto ks = parse_kinds(kinds);
    const auto e = empirical_measure(load_sample(sample_path));
    json out = json::array();
    for (auto k : ks) {
        const auto r = compute_bound(k, e, delta);
        out.push_back(to_json(r));
        std::cerr << to_string(k) << ": statistic " << fmt(r.statistic) << ", bound " << fmt(r.bound_value)
                  << (r.vacuous ? " (vacuous)" : "") << '\n';
    }
    emit(out);
    return kExitOk;
}

int cmd_rademacher(const std::string& sample_path) {
    const auto sample = load_sample(sample_path);
    const auto e = empirical_measure(sample);
    const auto r = rademacher_report(e);
    json j = to_json(r);
    j["seed"] = sample.master_seed;
    if (e.max_count() <= kExactCountLimit) j["exact_rational"] = to_string(empirical_rademacher_exact_rational(e));
    std::cerr << "m = " << r.m << ", Rhat = " << fmt(r.exact) << ", Khintchine [" << fmt(r.khintchine_lower) << ", "
              << fmt(r.khintchine_upper) << "]\n";
    emit(j);
    return kExitOk;
}

int cmd_lambda(const std::string& family, const std::string& m_list, double delta) {
    const auto f = parse_family(family);
    const auto mu = make_family(f);
    json out = json::array();
    for (auto m : parse_m_list(m_list)) {
        const auto lr = lambda_m(mu, m);
        json j = to_json(lr);
        j["family"] = to_string(f);
        j["expected_phi_upper"] = expected_phi_upper(mu, m);
        j["phi_high_prob_bound"] = phi_high_prob_bound(mu, m, delta);
        j["delta"] = delta;
        if (m >= 2) {
            const auto bk = bk_sandwich(mu, m);
            j["bk_sandwich"] = {{"lower", bk.lower}, {"upper", bk.upper}, {"vacuous", bk.vacuous}};
        }
        out.push_back(j);
        std::cerr << "m = " << m << ": Lambda = " << fmt(lr.lambda) << '\n';
    }
    emit(out);
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out, int threads) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError({"cannot open config file '" + config_path + "'"});
    auto cfg = config_from_stream(in);
    if (!out.empty()) {
        cfg.json_path = out + ".json";
        cfg.csv_path = out + ".csv";
    }
    if (threads >= 0) cfg.threads = static_cast<unsigned>(threads);
    const auto r = run_coverage(cfg);
    const auto j = to_json(r);
    if (!cfg.json_path.empty()) write_file(cfg.json_path, j.dump(2) + "\n");
    if (!cfg.csv_path.empty()) write_file(cfg.csv_path, to_csv(r));

    std::cerr << "family " << r.family_label << ", trials " << cfg.trials << ", seed " << cfg.master_seed
              << ", margin " << r.sigma_multiplier << " SE\n";
    std::cerr << "     m   delta  kind           coverage  threshold  status\n";
    for (const auto& c : r.coverage) {
        char line[128];
        std::snprintf(line, sizeof line, "%6llu  %6.3g  %-13s  %8.4f  %9.4f  %s\n",
                      static_cast<unsigned long long>(c.m), c.delta, std::string(to_string(c.kind)).c_str(),
                      c.coverage_hat, c.threshold, c.passed ? "ok" : "FAIL");
        std::cerr << line;
    }
    for (const auto& a : r.audits)
        if (!a.passed) std::cerr << "audit failed at m = " << a.m << ": " << a.name << " (" << a.lhs << " > " << a.rhs << ")\n";
    emit(j);
    return r.all_passed() ? kExitOk : kExitAssertion;
}

int cmd_packing(std::uint64_t d, double epsilon, std::uint64_t seed, std::uint64_t budget) {
    const auto fam = build_packing(d, epsilon, seed, budget);
    const auto check = check_packing(fam);
    json j = to_json(fam);
    j["check"] = to_json(check);
    std::cerr << "d = " << d << ", eps = " << epsilon << ": " << fam.members.size() << " members after "
              << fam.candidates_tested << " candidates, min pairwise TV " << fmt(check.min_pairwise_tv) << '\n';
    emit(j);
    return kExitOk;
}

int cmd_minimax(std::uint64_t d, double epsilon, const std::string& m_list, std::uint64_t trials, std::uint64_t seed,
                std::uint64_t budget, const std::string& out, int threads) {
    const auto ms = parse_m_list(m_list);
    detail::require(trials >= 1, "trials must be positive");
    const auto fam = build_packing(d, epsilon, seed, budget);
    const unsigned th = threads >= 0 ? static_cast<unsigned>(threads) : 0;
    json risks = json::array();
    for (auto m : ms) {
        const auto r = empirical_minimax_risk(fam, m, trials, seed, th);
        const std::string path = out + "_m" + std::to_string(m) + ".csv";
        write_file(path, to_csv(r));
        json j = to_json(r);
        j["csv"] = path;
        j["trials"] = trials;
        risks.push_back(j);
        std::cerr << "m = " << m << ": max risk " << fmt(r.max_risk) << " +- " << fmt(r.max_risk_se) << " -> " << path
                  << '\n';
    }
    emit({{"d", d}, {"epsilon", epsilon}, {"seed", seed}, {"family_size", fam.members.size()}, {"risks", risks}});
    return kExitOk;
}

int cmd_convergence(const std::string& family, const std::string& m_list, std::uint64_t trials, std::uint64_t seed,
                    int threads) {
    const auto f = parse_family(family);
    const auto curve = convergence_curve(make_family(f), parse_m_list(m_list), trials, seed,
                                         threads >= 0 ? static_cast<unsigned>(threads) : 0);
    json j = to_json(curve);
    j["family"] = to_string(f);
    j["trials"] = trials;
    j["seed"] = seed;
    for (const auto& p : curve.points)
        std::cerr << "m = " << p.m << ": mean phi " << fmt(p.phi.mean) << ", mean TV " << fmt(p.tv.mean) << '\n';
    emit(j);
    return curve.endpoint_decrease ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Empirical total-variation bounds for discrete distribution estimation"};
    app.require_subcommand(1, 1);

    std::string sample_path, config_path, family = "uniform(10)", kinds, m_list = "100", out;
    double delta = 0.05, epsilon = 0.05;
    std::uint64_t d = 16, trials = 1000, seed = 0, budget = 1'000'000;
    int threads = -1;

    auto* bound = app.add_subcommand("bound", "Confidence bounds on TV from a sample file");
    bound->add_option("sample", sample_path, "Sample file (one draw per line)")->required();
    bound->add_option("--delta", delta, "Failure probability in (0,1)");
    bound->add_option("--kinds", kinds, "Comma-separated bound kinds (default: all)");

    auto* rad = app.add_subcommand("rademacher", "Exact empirical Rademacher complexity of a sample");
    rad->add_option("sample", sample_path, "Sample file")->required();

    auto* lam = app.add_subcommand("lambda", "Oracle comparator Lambda_m for a family");
    lam->add_option("--family", family, "Family spec, e.g. zipf(2,100)");
    lam->add_option("--m", m_list, "Comma-separated sample sizes");
    lam->add_option("--delta", delta, "Confidence for the high-probability phi bound");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo coverage experiment from a JSON config");
    sim->add_option("--config", config_path, "Config file")->required();
    sim->add_option("--out", out, "Output prefix (writes <out>.json and <out>.csv)");
    sim->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* pack = app.add_subcommand("packing", "Build a packing family");
    pack->add_option("--d", d, "Even support size >= 16");
    pack->add_option("--epsilon", epsilon, "Separation in (0,1/16)");
    pack->add_option("--seed", seed, "Candidate order seed");
    pack->add_option("--budget", budget, "Maximum number of candidate codewords");

    auto* mm = app.add_subcommand("minimax", "Empirical MLE max-risk over a packing family");
    mm->add_option("--d", d, "Even support size >= 16");
    mm->add_option("--epsilon", epsilon, "Separation in (0,1/16)");
    mm->add_option("--m", m_list, "Comma-separated sample sizes");
    mm->add_option("--trials", trials, "Trials per member and m");
    mm->add_option("--seed", seed, "Master seed");
    mm->add_option("--budget", budget, "Maximum number of candidate codewords");
    mm->add_option("--out", out, "CSV prefix (writes <out>_m<m>.csv)")->default_val("minimax_risk");
    mm->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* conv = app.add_subcommand("convergence", "Mean phi and TV along a schedule of sample sizes");
    conv->add_option("--family", family, "Family spec");
    conv->add_option("--m", m_list, "Increasing comma-separated sample sizes");
    conv->add_option("--trials", trials, "Trials per m");
    conv->add_option("--seed", seed, "Master seed");
    conv->add_option("--threads", threads, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*bound) return cmd_bound(sample_path, delta, kinds);
        if (*rad) return cmd_rademacher(sample_path);
        if (*lam) return cmd_lambda(family, m_list, delta);
        if (*sim) return cmd_simulate(config_path, out, threads);
        if (*pack) return cmd_packing(d, epsilon, seed, budget);
        if (*mm) return cmd_minimax(d, epsilon, m_list, trials, seed, budget, out, threads);
        if (*conv) return cmd_convergence(family, m_list, trials, seed, threads);
    } catch (const ConstructionError& e) {
        std::cerr << "construction failed: " << e.what() << "\nachieved family size: " << e.achieved_size() << '\n';
        return kExitConstruction;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
