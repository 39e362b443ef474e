#include <doctest.h>

#include <sstream>
#include <vector>

#include <poweruct/theory_checks.hpp>

using namespace poweruct;

TEST_CASE("concentration check") {
    SUBCASE("p = 1 is the classical Hoeffding case") {
        const CheckReport r = check_concentration(500, 1.0, 0.1, 2000, 12);
        CHECK(r.passed);
        CHECK(r.check_name == "concentration");
    }
    SUBCASE("stated instance") {
        const CheckReport r = check_concentration(1000, 2.0, 0.1, 10000, 12);
        CHECK(r.passed);
        CHECK(r.analytic_bound_or_reference < 1e-6);  // 2 exp(0.16) exp(-20)
        CHECK(r.empirical_value == 0.0);
    }
    SUBCASE("epsilon zero is vacuous") {
        const CheckReport r = check_concentration(200, 2.0, 0.0, 500, 12);
        CHECK(r.passed);
        CHECK(r.analytic_bound_or_reference >= 1.0);
        CHECK(r.empirical_value > 0.9);  // deviations exceed zero almost surely
    }
}

TEST_CASE("suboptimal growth check") {
    const std::int64_t horizons[] = {100, 1000, 10000};
    SUBCASE("no gap means nothing to bound") {
        TestbedSpec spec;
        spec.means = {0.5, 0.5};
        const CheckReport r = check_suboptimal_growth(spec, 2.0, horizons, 10, 3, 1.414);
        CHECK(r.passed);
    }
    SUBCASE("large gap grows logarithmically for p = 1 and p = 2") {
        TestbedSpec spec;
        spec.means = {0.9, 0.1};
        for (double p : {1.0, 2.0}) {
            const CheckReport r = check_suboptimal_growth(spec, p, horizons, 100, 3, 1.414);
            CHECK(r.passed);
            CHECK(r.empirical_value <= r.analytic_bound_or_reference);
        }
    }
}

TEST_CASE("failure decay check") {
    const std::int64_t checkpoints[] = {100, 1000, 10000};
    SUBCASE("single arm never fails") {
        TestbedSpec spec;
        spec.means = {0.5};
        const CheckReport r = check_failure_decay(spec, 2.0, checkpoints, 20, 4, 1.414);
        CHECK(r.passed);
        CHECK(r.empirical_value == 0.0);
    }
    SUBCASE("two arms with a wide gap rarely fail at the end") {
        TestbedSpec spec;
        spec.means = {0.9, 0.1};
        const CheckReport r = check_failure_decay(spec, 2.0, checkpoints, 200, 4, 1.414);
        CHECK(r.passed);
        CHECK(r.empirical_value < 0.01);
    }
}

TEST_CASE("tree bias check") {
    const std::int64_t ladder[] = {100, 1000, 10000};
    SUBCASE("known 2x2 instance converges for p = 1, 2 and 4") {
        for (double p : {1.0, 2.0, 4.0}) {
            const CheckReport r =
                check_tree_bias(2, 2, {0.9, 0.1, 0.5, 0.5}, p, ladder, 100, 5, 1.414);
            CHECK(r.passed);
            CHECK(r.empirical_value < r.analytic_bound_or_reference);
        }
    }
    SUBCASE("identical leaves have vanishing bias") {
        const CheckReport r = check_tree_bias(2, 2, {0.5, 0.5, 0.5, 0.5}, 2.0, ladder, 100, 6, 1.414);
        CHECK(r.empirical_value < 0.01);
    }
}

TEST_CASE("checks are reproducible for a fixed seed") {
    const std::int64_t horizons[] = {100, 1000};
    TestbedSpec spec;
    spec.means = {0.8, 0.3};
    const CheckReport a = check_suboptimal_growth(spec, 2.0, horizons, 20, 99, 1.414);
    const CheckReport b = check_suboptimal_growth(spec, 2.0, horizons, 20, 99, 1.414);
    CHECK(a.empirical_value == b.empirical_value);
    CHECK(a.passed == b.passed);
}

TEST_CASE("reports serialize as JSON lines") {
    std::vector<CheckReport> reports{{"demo", 10, 0.5, 1.0, true, 42}};
    std::ostringstream out;
    write_reports_jsonl(reports, out);
    const std::string line = out.str();
    CHECK(line.find("\"check_name\":\"demo\"") != std::string::npos);
    CHECK(line.find("\"passed\":true") != std::string::npos);
    CHECK(line.back() == '\n');
}
