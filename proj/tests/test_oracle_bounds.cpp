#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "tvbound/empirical.hpp"
#include "tvbound/errors.hpp"
#include "tvbound/oracle_bounds.hpp"
#include "tvbound/sampling.hpp"

using namespace tvbound;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Distribution uniform(std::uint64_t d) { return make_family(UniformFamily{d}); }
const Distribution kPoint({{1, 1.0}});

// Exact E[f(mhat)] over every ordered sample of size m (support^m outcomes).
template <class F>
double exact_expectation(const Distribution& mu, std::size_t m, F f) {
    const auto atoms = mu.atoms();
    const std::size_t s = atoms.size();
    std::vector<std::size_t> pos(m, 0);
    std::vector<Index> draws(m);
    double total = 0.0;
    for (;;) {
        double p = 1.0;
        for (std::size_t t = 0; t < m; ++t) {
            p *= atoms[pos[t]].mass;
            draws[t] = atoms[pos[t]].index;
        }
        total += p * f(empirical_measure(draws));
        std::size_t t = 0;
        while (t < m && ++pos[t] == s) pos[t++] = 0;
        if (t == m) break;
    }
    return total;
}

}  // namespace

TEST_CASE("lambda_m examples") {
    const auto a = lambda_m(uniform(4), 16);
    CHECK(a.small_atom_mass == 0.0);
    CHECK_THAT(a.lambda, WithinAbs(0.25, 1e-15));

    const auto b = lambda_m(uniform(10), 5);
    CHECK_THAT(b.small_atom_mass, WithinAbs(1.0, 1e-15));
    CHECK(b.large_atom_term == 0.0);
    CHECK_THAT(b.lambda, WithinAbs(1.0, 1e-15));

    CHECK_THAT(lambda_m(kPoint, 100).lambda, WithinAbs(0.05, 1e-15));
    CHECK(lambda_m(kPoint, 100).m == 100);
}

TEST_CASE("an atom of mass exactly 1/m goes to the square-root term") {
    const auto r = lambda_m(uniform(4), 4);
    CHECK(r.small_atom_mass == 0.0);
    CHECK_THAT(r.large_atom_term, WithinRel(0.5, 1e-15));
    CHECK_THROWS_AS(lambda_m(uniform(4), 0), ParameterError);
    CHECK_THROWS_AS(lambda_m(Distribution({{1, 0.5}}), 4), ParameterError);
}

TEST_CASE("lambda_m decreases along geometric(1/2,64)") {
    const auto g = make_family(GeometricFamily{0.5, 64});
    for (std::uint64_t m = 10; m <= 100000; m *= 10) CHECK(lambda_m(g, 2 * m).lambda < lambda_m(g, m).lambda);
}

TEST_CASE("lambda_m is at most sqrt(d/m) on uniform families once m >= d") {
    for (std::uint64_t d : {1, 2, 5, 10, 100})
        for (std::uint64_t m : {d, 2 * d, 10 * d, 1000 * d})
            CHECK(lambda_m(uniform(d), m).lambda <= std::sqrt(double(d) / double(m)) + 1e-15);
}

TEST_CASE("bk_sandwich examples") {
    const auto p = bk_sandwich(kPoint, 100);
    CHECK_THAT(p.lower, WithinAbs(-0.0125, 1e-15));
    CHECK_THAT(p.upper, WithinAbs(0.05, 1e-15));
    CHECK(p.vacuous);

    const auto u4 = bk_sandwich(uniform(4), 16);
    CHECK_THAT(u4.lower, WithinAbs(0.0, 1e-15));
    CHECK_THAT(u4.upper, WithinAbs(0.25, 1e-15));

    const auto u10 = bk_sandwich(uniform(10), 5);
    CHECK_THAT(u10.lower, WithinAbs(0.138196601125011, 1e-14));
    CHECK_THAT(u10.upper, WithinAbs(1.0, 1e-15));
    CHECK_FALSE(u10.vacuous);

    CHECK_THROWS_AS(bk_sandwich(kPoint, 1), ParameterError);
}

TEST_CASE("expected_phi_upper examples") {
    CHECK_THAT(expected_phi_upper(kPoint, 4), WithinAbs(0.5, 1e-15));
    CHECK_THAT(expected_phi_upper(uniform(4), 16), WithinAbs(0.5, 1e-15));
    CHECK_THAT(expected_phi_upper(uniform(10), 5), WithinAbs(1.0, 1e-15));
}

TEST_CASE("phi_high_prob_bound examples") {
    CHECK_THAT(phi_high_prob_bound(kPoint, 100, std::exp(-1.0)), WithinAbs(0.2, 1e-15));
    CHECK_THAT(phi_high_prob_bound(uniform(4), 16, 1.0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(phi_high_prob_bound(uniform(10), 5, 0.05), WithinAbs(2.77404551204099, 1e-13));
    CHECK_THROWS_AS(phi_high_prob_bound(kPoint, 10, 0.0), ParameterError);
    CHECK_THROWS_AS(phi_high_prob_bound(kPoint, 10, 1.5), ParameterError);
}

TEST_CASE("exact expectations respect the oracle bounds on small instances") {
    const std::vector<Distribution> cases = {uniform(3), make_family(TwoPointFamily{0.1}),
                                             make_family(ZipfFamily{2.0, 4}),
                                             Distribution::from_masses(std::vector<double>{0.7, 0.2, 0.05, 0.05})};
    for (const auto& mu : cases) {
        for (std::size_t m = 2; m <= 7; ++m) {
            const double e_phi = exact_expectation(mu, m, [](const EmpiricalMeasure& e) { return phi(e); });
            const double e_tv =
                exact_expectation(mu, m, [&](const EmpiricalMeasure& e) { return tv_distance(e.base(), mu); });
            const auto lam = lambda_m(mu, m).lambda;
            const auto bk = bk_sandwich(mu, m);
            INFO("m = " << m << ", E[phi] = " << e_phi << ", E[TV] = " << e_tv << ", Lambda = " << lam);
            CHECK(e_phi <= expected_phi_upper(mu, m) + 1e-12);
            CHECK(expected_phi_upper(mu, m) <= 2.0 * lam + 1e-12);
            CHECK(e_tv <= e_phi + 1e-12);
            CHECK(e_tv <= bk.upper + 1e-12);
            CHECK(e_tv >= bk.lower - 1e-12);
        }
    }
}
