#include <doctest.h>

#include "cases.hpp"
#include "reserveflow/io.hpp"
#include "reserveflow/errors.hpp"
#include "reserveflow/ptdf.hpp"

using namespace reserveflow;

TEST_CASE("ring shift factors against hand-solved angles") {
    // Injecting 1 at bus b and withdrawing at the slack: B_red theta = e_b with
    // B_red = [[2,-1],[-1,2]], so theta = (2/3, 1/3) for bus 1 and (1/3, 2/3) for bus 2.
    auto mc = testutil::ring3();
    auto S = base_shift_factors(mc).matrix;
    REQUIRE(S.rows() == 3);
    REQUIRE(S.cols() == 3);
    const double col1[] = {-2.0 / 3, 1.0 / 3, 1.0 / 3};
    const double col2[] = {-1.0 / 3, -1.0 / 3, 2.0 / 3};
    for (int i = 0; i < 3; ++i) {
        CHECK(S(i, 0) == 0.0);
        CHECK(S(i, 1) == doctest::Approx(col1[i]).epsilon(1e-12));
        CHECK(S(i, 2) == doctest::Approx(col2[i]).epsilon(1e-12));
    }
}

TEST_CASE("shift factors agree with the angle solve") {
    auto mc = fixture_ieee118();
    auto S = base_shift_factors(mc).matrix;
    auto sys = phase_angle_system(mc);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(mc.n_buses(), -1.0, 1.0);
    x.array() -= x.mean();  // balanced injection
    Eigen::MatrixXd Br = sys.reduced();
    Eigen::VectorXd xr(mc.n_buses() - 1);
    for (int b = 0, r = 0; b < mc.n_buses(); ++b)
        if (b != sys.slack_bus) xr[r++] = x[b];
    Eigen::VectorXd thr = Br.ldlt().solve(xr);
    Eigen::VectorXd th = Eigen::VectorXd::Zero(mc.n_buses());
    for (int b = 0, r = 0; b < mc.n_buses(); ++b)
        if (b != sys.slack_bus) th[b] = thr[r++];
    Eigen::VectorXd a = S * x, b = sys.F * th;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("outage halves a two-circuit line") {
    auto mc = fixture_twobus();
    auto base = scenario_network(mc, -1), s1 = scenario_network(mc, 0), s4 = scenario_network(mc, 3);
    CHECK(base.capacity[0] == 2.0);
    CHECK(s1.capacity[0] == doctest::Approx(1.0 * 1.2));
    CHECK(s4.capacity[0] == doctest::Approx(2.0 * 1.2));
    // on two buses every unit injected at bus 2 flows back over the line
    CHECK(base.shift.matrix(0, 1) == doctest::Approx(-1.0));
    CHECK(s1.shift.matrix(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("serial and parallel network builds match") {
    auto mc = fixture_ieee118();
    auto a = build_network(mc, Execution::serial), b = build_network(mc, Execution::parallel);
    REQUIRE(a.scenarios.size() == b.scenarios.size());
    CHECK(a.base.shift.matrix == b.base.shift.matrix);
    for (std::size_t k = 0; k < a.scenarios.size(); ++k) {
        CHECK(a.scenarios[k].shift.matrix == b.scenarios[k].shift.matrix);
        CHECK(a.scenarios[k].capacity == b.scenarios[k].capacity);
    }
}

TEST_CASE("islanding is reported") {
    auto mc = testutil::ring3();
    mc.scenarios[0].outages = {{0, 1}, {1, 1}};
    CHECK_THROWS_AS(scenario_network(mc, 0), IslandedNetwork);
}
