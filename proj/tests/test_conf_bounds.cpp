#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "tvbound/conf_bounds.hpp"
#include "tvbound/errors.hpp"

using namespace tvbound;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EmpiricalMeasure emp(const std::vector<Index>& draws) { return empirical_measure(draws); }

}  // namespace

TEST_CASE("bound kind names") {
    CHECK(to_string(BoundKind::PhiUpper) == "thm1_upper");
    CHECK(to_string(BoundKind::RademacherLowerRefined) == "remark_lower");
    for (auto k : kAllBoundKinds) {
        CHECK(parse_bound_kind(to_string(k)) == k);
        const auto name = to_string(k);
        CHECK(parse_bound_kind(name.substr(0, name.find('_'))) == k);
    }
    CHECK_THROWS_AS(parse_bound_kind("thm3"), ParameterError);
    CHECK(is_upper(BoundKind::RademacherUpper));
    CHECK_FALSE(is_upper(BoundKind::PhiLower));
    CHECK(uses_phi(BoundKind::PhiLower));
    CHECK_FALSE(uses_phi(BoundKind::RademacherLower));
}

TEST_CASE("phi upper bound") {
    CHECK_THAT(evaluate_bound(BoundKind::PhiUpper, 100, 0.05, 0.3), WithinAbs(0.707430454722186, 1e-14));
    // ln(2/delta) = 2
    const double delta = 2.0 * std::exp(-2.0);
    CHECK_THAT(evaluate_bound(BoundKind::PhiUpper, 200, delta, 0.4), WithinAbs(0.4 + 3.0 * std::sqrt(1.0 / 200.0), 1e-15));
    // delta close to 1 keeps a positive penalty
    const double near_one = evaluate_bound(BoundKind::PhiUpper, 50, 1.0 - 1e-12, 0.2);
    CHECK_THAT(near_one, WithinAbs(0.2 + 3.0 * std::sqrt(std::log(2.0) / 100.0), 1e-9));

    const auto r = phi_upper_bound(emp({1, 1, 1, 1}), 0.05);
    CHECK(r.kind == BoundKind::PhiUpper);
    CHECK(r.statistic == 0.5);
    CHECK_THAT(r.bound_value, WithinAbs(2.5371522736109292, 1e-14));
    CHECK_FALSE(r.vacuous);
}

TEST_CASE("phi lower bound") {
    CHECK_THAT(evaluate_bound(BoundKind::PhiLower, 10000, 0.05, 1.0), WithinAbs(0.119157327817442, 1e-14));
    const auto r = make_bound_report(BoundKind::PhiLower, 100, 0.05, 0.3);
    CHECK_THAT(r.bound_value, WithinAbs(-0.523160666202961, 1e-14));
    CHECK(r.vacuous);
    CHECK(evaluate_bound(BoundKind::PhiLower, 100, 0.5, 0.0) < 0.0);
}

TEST_CASE("rademacher upper bound") {
    const auto aa = rademacher_upper_bound(rademacher_report(emp({1, 1})), 0.5);
    CHECK(aa.statistic == 0.25);
    CHECK_THAT(aa.bound_value, WithinAbs(2.26611503377321, 1e-13));

    const auto ab = emp({1, 2});
    CHECK(rademacher_upper_bound(rademacher_report(ab), 0.05).bound_value <= phi_upper_bound(ab, 0.05).bound_value);

    const auto pm = emp(std::vector<Index>(10000, 1));
    CHECK_THAT(compute_bound(BoundKind::RademacherUpper, pm, 0.05).bound_value,
               WithinAbs(0.048721691611600738715, 1e-14));
}

TEST_CASE("rademacher lower bounds") {
    const auto a = make_bound_report(BoundKind::RademacherLower, 10000, 0.05, 0.04);
    CHECK_THAT(a.bound_value, WithinAbs(-0.0376193674791952, 1e-14));
    CHECK(a.vacuous);
    const auto b = make_bound_report(BoundKind::RademacherLower, 1000000, 0.05, 0.04);
    CHECK_THAT(b.bound_value, WithinAbs(0.0142380632520805, 1e-14));
    CHECK_FALSE(b.vacuous);

    const auto c = make_bound_report(BoundKind::RademacherLowerRefined, 10000, 0.05, 0.04);
    CHECK_THAT(c.bound_value, WithinAbs(-0.00287152273610929, 1e-14));
    CHECK(c.vacuous);
    const auto d = make_bound_report(BoundKind::RademacherLowerRefined, 1000000, 0.05, 0.04);
    CHECK_THAT(d.bound_value, WithinAbs(0.0177128477263891, 1e-14));
    CHECK(d.bound_value >= b.bound_value);

    CHECK_THROWS_AS(make_bound_report(BoundKind::RademacherLower, 100, 2.0, 0.04), ParameterError);
    CHECK_THROWS_AS(make_bound_report(BoundKind::PhiUpper, 100, 0.0, 0.04), ParameterError);
    CHECK_THROWS_AS(make_bound_report(BoundKind::PhiUpper, 0, 0.1, 0.04), ParameterError);
}

TEST_CASE("report wrappers reproduce evaluate_bound") {
    const auto e = emp({1, 1, 2, 3, 3, 3});
    const auto rr = rademacher_report(e);
    for (double delta : {0.01, 0.2, 0.9}) {
        CHECK(phi_lower_bound(e, delta).bound_value == evaluate_bound(BoundKind::PhiLower, 6, delta, phi(e)));
        CHECK(rademacher_lower_bound(rr, delta).bound_value ==
              evaluate_bound(BoundKind::RademacherLower, 6, delta, rr.exact));
        CHECK(rademacher_lower_bound_refined(rr, delta).bound_value ==
              evaluate_bound(BoundKind::RademacherLowerRefined, 6, delta, rr.exact));
        for (auto k : kAllBoundKinds) {
            const auto r = compute_bound(k, e, delta);
            CHECK(r.m == 6);
            CHECK(r.delta == delta);
            CHECK(r.vacuous == (!is_upper(k) && r.bound_value < 0.0));
        }
    }
}

TEST_CASE("the Rademacher upper bound never exceeds the phi upper bound") {
    std::mt19937_64 g(41);
    for (int i = 0; i < 400; ++i) {
        std::vector<Index> d(1 + g() % 200);
        const auto a = 1 + g() % 40;
        for (auto& x : d) x = 1 + g() % a;
        const auto e = emp(d);
        CHECK(2.0 * empirical_rademacher_exact(e) <= phi(e) * (1.0 + 1e-12));
        CHECK(compute_bound(BoundKind::RademacherUpper, e, 0.1).bound_value <=
              compute_bound(BoundKind::PhiUpper, e, 0.1).bound_value + 1e-12);
        CHECK(compute_bound(BoundKind::PhiUpper, e, 0.1).bound_value >= 0.0);
    }
}
