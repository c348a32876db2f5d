#include <doctest.h>

#include <cmath>

#include "cases.hpp"
#include "reserveflow/clearing.hpp"
#include "reserveflow/errors.hpp"
#include "reserveflow/io.hpp"
#include "reserveflow/pricing.hpp"

using namespace reserveflow;

// Frozen values come from tests/oracle/model_two.py (angle formulation, HiGHS).

TEST_CASE("two-bus clearing") {
    auto mc = fixture_twobus();
    auto m = build_model_two(mc);
    CHECK(m.lp.n_vars() == 54);
    auto s = solve_clearing(mc);
    CHECK(s.expected_total_cost == doctest::Approx(396.4212).epsilon(1e-10));
    const double g[] = {8, 17, 0}, ru[] = {2.4, 1, 4}, rd[] = {0.8, 0, 0};
    for (int j = 0; j < 3; ++j) {
        CHECK(s.g[j] == doctest::Approx(g[j]).epsilon(1e-7).scale(1));
        CHECK(s.r_up[j] == doctest::Approx(ru[j]).epsilon(1e-7).scale(1));
        CHECK(s.r_down[j] == doctest::Approx(rd[j]).epsilon(1e-7).scale(1));
    }
    CHECK(s.kkt.worst() < 1e-8);
    CHECK(expected_cost(mc, s) == doctest::Approx(s.expected_total_cost).epsilon(1e-10));
}

TEST_CASE("ring with a binding line sheds in the scenario") {
    auto mc = testutil::ring3(30.0);
    auto s = solve_clearing(mc);
    CHECK(s.expected_total_cost == doctest::Approx(2200.0).epsilon(1e-9));
    CHECK(s.g[0] == doctest::Approx(30.0).epsilon(1e-8));
    CHECK(s.g[1] == doctest::Approx(30.0).epsilon(1e-8));
    CHECK(s.shed[0][0] == doctest::Approx(5.0).epsilon(1e-7));

    auto loose = solve_clearing(testutil::ring3(100.0));
    CHECK(loose.expected_total_cost == doctest::Approx(617.0).epsilon(1e-9));
    CHECK(loose.r_up[0] == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("recourse at the optimum reproduces the objective") {
    auto mc = fixture_twobus();
    auto s = solve_clearing(mc);
    auto r = evaluate_recourse_cost(mc, {s.g, s.r_up, s.r_down});
    REQUIRE(r.feasible);
    CHECK(std::abs(r.expected_cost - s.expected_total_cost) < 1e-8 * (1 + s.expected_total_cost));
}

TEST_CASE("recourse with no reserve falls back on shedding") {
    auto mc = fixture_twobus();
    auto s = solve_clearing(mc);
    std::vector<double> zero(3, 0.0);
    // the base dispatch with zero reserve cannot go down, so S3/S5 (d3 drops) fail
    auto r = evaluate_recourse_cost(mc, {s.g, zero, zero});
    CHECK(!r.feasible);
    CHECK(!r.violated.empty());
    // with downward room kept, upward needs are met by shedding at a large cost
    auto r2 = evaluate_recourse_cost(mc, {s.g, zero, s.r_down});
    if (r2.feasible) CHECK(r2.expected_cost > s.expected_total_cost);
}

TEST_CASE("traditional model") {
    auto mc = fixture_twobus();
    auto t = solve_traditional(mc, 7.4, 0.8);
    CHECK(t.objective == doctest::Approx(336.6).epsilon(1e-9));
    double su = 0, sd = 0;
    for (int j = 0; j < 3; ++j) {
        su += t.r_up[j];
        sd += t.r_down[j];
    }
    CHECK(su == doctest::Approx(7.4).epsilon(1e-9));
    CHECK(sd == doctest::Approx(0.8).epsilon(1e-9));
    // G3 is the marginal upward reserve
    CHECK(t.gamma_up == doctest::Approx(2.5).epsilon(1e-7));
    CHECK(t.gamma_down == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("infeasible market carries certificate rows") {
    auto mc = fixture_twobus();
    for (auto& g : mc.generators) g.g_max = 5;  // 15 MW for 25 MW of load
    for (auto& l : mc.loads) l.c_shed = 60;
    try {
        solve_clearing(mc);
        FAIL("expected InfeasibleMarket");
    } catch (const InfeasibleMarket& e) {
        CHECK(!e.constraints.empty());
    }
}

TEST_CASE("serial and parallel solves agree") {
    auto mc = fixture_twobus();
    SolverOptions a, b;
    a.execution = Execution::serial;
    b.execution = Execution::parallel;
    auto s1 = solve_clearing(mc, a), s2 = solve_clearing(mc, b);
    CHECK(s1.raw.x == s2.raw.x);
    CHECK(s1.raw.eq_duals == s2.raw.eq_duals);
}
