// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tvbound/tvbound.hpp"

using namespace tvbound;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Every sequence over {1..k} in which each new symbol is the next unused one
// (restricted growth strings): one representative per relabeling class.
void for_each_rgs(std::size_t m, Index max_symbols, const std::function<void(const std::vector<Index>&)>& f) {
    std::vector<Index> s(m, 0);
    std::function<void(std::size_t, Index)> rec = [&](std::size_t t, Index used) {
        if (t == m) {
            f(s);
            return;
        }
        for (Index x = 1; x <= std::min<Index>(used + 1, max_symbols); ++x) {
            s[t] = x;
            rec(t + 1, std::max(used, x));
        }
    };
    rec(0, 0);
}

Outcome rademacher_exactness() {
    Outcome o;
    const auto t0 = Clock::now();
    std::size_t exhaustive = 0, mismatches = 0;
    for (std::size_t m = 1; m <= 10; ++m) {
        for_each_rgs(m, 3, [&](const std::vector<Index>& s) {
            ++exhaustive;
            if (empirical_rademacher_exact_rational(empirical_measure(s)) != empirical_rademacher_bruteforce_rational(s))
                ++mismatches;
        });
    }
    Rng rng(derive_seed(101));
    double max_err = 0.0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t m = 1 + rng.below(20);
        const Index alphabet = 1 + rng.below(8);
        Sample s{{}, 0, ""};
        for (std::size_t t = 0; t < m; ++t) s.draws.push_back(1 + rng.below(alphabet));
        max_err = std::max(max_err, std::abs(empirical_rademacher_exact(empirical_measure(s)) -
                                             empirical_rademacher_bruteforce(s)));
    }
    const double secs = seconds_since(t0);
    o.pass = mismatches == 0 && max_err <= 1e-12 && secs < 60.0;
    o.detail = std::to_string(exhaustive) + " exhaustive classes, " + std::to_string(mismatches) +
               " rational mismatches; 200 random max |diff| = " + detail::fmt_num(max_err) + "; " +
               detail::fmt_num(secs) + " s";
    return o;
}

Outcome fixed_points() {
    const auto ab = empirical_rademacher_exact_rational(empirical_measure(std::vector<Index>{1, 2}));
    const auto aa = empirical_rademacher_exact_rational(empirical_measure(std::vector<Index>{1, 1}));
    const auto aaa = empirical_rademacher_exact_rational(empirical_measure(std::vector<Index>{1, 1, 1}));
    Outcome o;
    o.pass = ab == ExactRational{1, 2} && aa == ExactRational{1, 4} && aaa == ExactRational{1, 4} &&
             empirical_rademacher_bruteforce_rational(std::vector<Index>{1, 2}) == ab &&
             empirical_rademacher_bruteforce_rational(std::vector<Index>{1, 1}) == aa &&
             empirical_rademacher_bruteforce_rational(std::vector<Index>{1, 1, 1}) == aaa;
    o.detail = "(a,b) = " + to_string(ab) + ", (a,a) = " + to_string(aa) + ", (a,a,a) = " + to_string(aaa);
    return o;
}

Outcome sandwiches() {
    const auto t0 = Clock::now();
    Rng rng(derive_seed(103));
    const std::vector<FamilySpec> fams = {UniformFamily{10}, UniformFamily{500}, ZipfFamily{2.0, 100},
                                          GeometricFamily{0.5, 64}, TwoPointFamily{0.1}};
    std::size_t khintchine_bad = 0, wallis_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto mu = make_family(fams[static_cast<std::size_t>(i) % fams.size()]);
        const std::uint64_t m = 1 + rng.below(3000);
        const auto e = empirical_measure(draw_iid(mu, m, rng.next_u64()));
        const double r = empirical_rademacher_exact(e);
        // endpoints are attained exactly (all counts 1 or all counts 2), so allow rounding
        khintchine_bad += !khintchine_sandwich(e).contains(r, 1e-12);
        wallis_bad += !wallis_first_order(e).contains(r);
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = khintchine_bad == 0 && wallis_bad == 0 && secs < 30.0;
    o.detail = "1000 samples: " + std::to_string(khintchine_bad) + " Khintchine and " + std::to_string(wallis_bad) +
               " Wallis violations; " + detail::fmt_num(secs) + " s";
    return o;
}

const std::vector<FamilySpec> kCoverageFamilies = {UniformFamily{10}, ZipfFamily{2.0, 100}, GeometricFamily{0.5, 64},
                                                   TwoPointFamily{0.1}};

std::vector<ExperimentResult> coverage_runs(double& secs) {
    const auto t0 = Clock::now();
    std::vector<ExperimentResult> out;
    for (std::size_t i = 0; i < kCoverageFamilies.size(); ++i) {
        ExperimentConfig c;
        c.family = kCoverageFamilies[i];
        c.m_values = {100, 1000};
        c.delta_values = {0.05, 0.2};
        c.trials = 10000;
        c.master_seed = derive_seed(104, i);
        out.push_back(run_coverage(c));
    }
    secs = seconds_since(t0);
    return out;
}

Outcome coverage(const std::vector<ExperimentResult>& runs, double secs) {
    Outcome o;
    std::size_t cells = 0, failed = 0;
    double worst_margin = 1.0;
    std::string worst;
    for (const auto& r : runs) {
        for (const auto& c : r.coverage) {
            ++cells;
            failed += !c.passed;
            const double margin = c.coverage_hat - c.threshold;
            if (margin < worst_margin) {
                worst_margin = margin;
                worst = r.family_label + " m=" + std::to_string(c.m) + " delta=" + detail::fmt_num(c.delta) + " " +
                        std::string(to_string(c.kind)) + " coverage " + detail::fmt_num(c.coverage_hat);
            }
        }
    }
    o.pass = failed == 0 && secs < 600.0;
    o.detail = std::to_string(cells) + " cells, " + std::to_string(failed) + " below 1-delta-3SE; tightest: " + worst +
               "; " + detail::fmt_num(secs) + " s";
    return o;
}

Outcome expectation_sandwiches(const std::vector<ExperimentResult>& runs) {
    Outcome o;
    std::size_t checks = 0, failed = 0;
    std::string first_failure;
    for (const auto& r : runs) {
        for (const auto& a : r.audits) {
            const bool relevant = a.name == "mean_tv <= lambda" || a.name == "bk_lower <= mean_tv" ||
                                  a.name == "mean_phi <= 2 lambda" || a.name == "mean_tv <= mean_phi";
            if (!relevant) continue;
            ++checks;
            if (!a.passed) {
                ++failed;
                if (first_failure.empty()) first_failure = "; first failure: " + r.family_label + " " + a.name;
            }
        }
    }
    o.pass = failed == 0 && checks == 4 * runs.size() * 2;
    o.detail = std::to_string(checks) + " checks (BK sandwich, E[phi] <= 2 Lambda, E[TV] <= E[phi]), " +
               std::to_string(failed) + " failed" + first_failure;
    return o;
}

Outcome missing_mass_check() {
    Outcome o;
    std::ostringstream d;
    const auto u = missing_mass_inequality(make_family(UniformFamily{100}), 50, 10000, derive_seed(106, 1));
    const auto z = missing_mass_inequality(make_family(ZipfFamily{2.0, 100}), 100, 10000, derive_seed(106, 2));
    const auto ex = exact_expectations(make_family(TwoPointFamily{0.1}), 3);
    o.pass = u.holds && z.holds && ex.outcomes == 8 && 2.0 * ex.tv >= ex.missing && ex.pointwise_two_tv_ge_missing;
    d << "uniform(100)/50: 2E[TV] " << u.two_tv.mean << " vs E[U] " << u.missing.mean << "; zipf(2,100)/100: "
      << z.two_tv.mean << " vs " << z.missing.mean << "; two_point(0.1)/3 exact over " << ex.outcomes << " outcomes: "
      << 2.0 * ex.tv << " vs " << ex.missing;
    o.detail = d.str();
    return o;
}

Outcome kl_budget() {
    Outcome o;
    double worst = -1.0;
    std::size_t bad = 0;
    for (int k = 1; k <= 45; ++k) {
        const double eps = 0.01 * k;
        const double kl = lecam_pair(eps).kl;
        bad += kl > 4.0 * eps * eps + 1e-12;
        worst = std::max(worst, kl / (4.0 * eps * eps));
    }
    o.pass = bad == 0;
    o.detail = "45 grid points, max KL/(4 eps^2) = " + detail::fmt_num(worst);
    return o;
}

Outcome packing() {
    Outcome o;
    const auto t0 = Clock::now();
    std::ostringstream d;
    for (std::uint64_t dim : {16, 32}) {
        const auto fam = build_packing(dim, 0.05, 0);
        const auto c = check_packing(fam);
        const bool ok = c.size_exceeds_target && c.has_zero_codeword && c.all_proper &&
                        c.min_pairwise_tv >= 2.0 * 0.05 - 1e-12 && c.max_identity_error <= 1e-12;
        o.pass = o.pass && ok;
        d << "d=" << dim << ": size " << fam.members.size() << " > 2^" << dim / 16 << ", min TV " << c.min_pairwise_tv
          << ", identity error " << c.max_identity_error << "; ";
    }
    const double secs = seconds_since(t0);
    o.pass = o.pass && secs < 30.0;
    d << secs << " s";
    o.detail = d.str();
    return o;
}

Outcome minimax_risk() {
    Outcome o;
    const auto fam = build_packing(16, 0.05, 0);
    const auto lo = empirical_minimax_risk(fam, 10, 1000, derive_seed(109, 1));
    const auto hi = empirical_minimax_risk(fam, 100000, 1000, derive_seed(109, 2));
    o.pass = lo.max_risk > 0.9 && hi.max_risk < 0.05;
    o.detail = "max risk at m=10: " + detail::fmt_num(lo.max_risk) + ", at m=1e5: " + detail::fmt_num(hi.max_risk);
    return o;
}

Outcome bounded_differences() {
    Outcome o;
    std::size_t swaps = 0, bad = 0;
    double worst = 0.0;
    for (std::size_t m = 1; m <= 6; ++m) {
        std::vector<Index> s(m, 1);
        for (;;) {
            for (std::size_t t = 0; t < m; ++t) {
                for (Index x = 1; x <= 3; ++x) {
                    const double delta = phi_swap_delta(s, t, x);
                    ++swaps;
                    bad += delta > 2.0 / static_cast<double>(m);
                    worst = std::max(worst, delta * static_cast<double>(m));
                }
            }
            std::size_t k = 0;
            while (k < m && ++s[k] == 4) s[k++] = 1;
            if (k == m) break;
        }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(swaps) + " swaps, " + std::to_string(bad) + " over 2/m, max m*|dphi| = " +
               detail::fmt_num(worst);
    return o;
}

Outcome determinism() {
    ExperimentConfig c;
    c.family = ZipfFamily{2.0, 100};
    c.m_values = {50, 500};
    c.delta_values = {0.05, 0.2};
    c.trials = 2000;
    c.master_seed = 111;
    c.threads = 1;
    const auto serial = to_csv(run_coverage(c));
    const auto serial_again = to_csv(run_coverage(c));
    c.threads = 0;
    const auto parallel = to_csv(run_coverage(c));
    c.threads = 5;
    const auto five = to_csv(run_coverage(c));
    Outcome o;
    o.pass = serial == serial_again && serial == parallel && serial == five;
    o.detail = "CSV of " + std::to_string(serial.size()) + " bytes; serial replay " +
               (serial == serial_again ? "identical" : "DIFFERS") + ", parallel " +
               (serial == parallel && serial == five ? "identical" : "DIFFERS");
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::printf("%s [%2d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    };
    auto guarded = [&](int id, const char* name, const std::function<Outcome()>& f) {
        try {
            report(id, name, f());
        } catch (const std::exception& e) {
            report(id, name, Outcome{false, std::string("exception: ") + e.what()});
        }
    };

    guarded(1, "Rademacher closed form equals brute force", rademacher_exactness);
    guarded(2, "Rademacher fixed points", fixed_points);
    guarded(3, "Khintchine and Wallis containment", sandwiches);
    double secs = 0.0;
    std::vector<ExperimentResult> runs;
    try {
        runs = coverage_runs(secs);
    } catch (const std::exception& e) {
        std::printf("coverage runs failed: %s\n", e.what());
    }
    guarded(4, "coverage audit", [&] { return coverage(runs, secs); });
    guarded(5, "expectation sandwiches", [&] { return expectation_sandwiches(runs); });
    guarded(6, "missing-mass inequality", missing_mass_check);
    guarded(7, "two-point KL budget", kl_budget);
    guarded(8, "packing construction", packing);
    guarded(9, "minimax risk shape", minimax_risk);
    guarded(10, "phi bounded differences", bounded_differences);
    guarded(11, "determinism", determinism);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
