#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cases.hpp"
#include "reserveflow/io.hpp"
#include "reserveflow/model.hpp"

using namespace reserveflow;

namespace {
bool has(const std::vector<Finding>& f, const std::string& code) {
    for (const auto& x : f)
        if (x.code == code) return true;
    return false;
}
}  // namespace

TEST_CASE("two-bus fixture contents") {
    auto mc = fixture_twobus();
    CHECK(mc.n_buses() == 2);
    CHECK(mc.n_gens() == 3);
    CHECK(mc.n_loads() == 3);
    CHECK(mc.n_scenarios() == 5);
    // bids and loads as published
    CHECK(mc.generators[0].c_energy == 8);
    CHECK(mc.generators[1].c_energy == 15);
    CHECK(mc.generators[2].c_energy == 20);
    CHECK(mc.generators[2].c_ru == 2.5);
    CHECK(mc.loads[0].base_demand + mc.loads[1].base_demand + mc.loads[2].base_demand == 25);
    double eps = 0;
    for (const auto& s : mc.scenarios) eps += s.probability;
    CHECK(eps == doctest::Approx(0.46).epsilon(1e-15));
    CHECK(mc.scenarios[1].probability == 0.02);
    CHECK(mc.scenarios[1].c_redispatch_up[0] == 19.7);
    CHECK(mc.scenarios[1].c_redispatch_up[1] == 33.8);
    CHECK(validate_case(mc).ok());
}

TEST_CASE("fixtures are deterministic") {
    CHECK(fixture_twobus() == fixture_twobus());
}

TEST_CASE("118-bus fixture") {
    auto mc = fixture_ieee118();
    CHECK(mc.n_buses() == 118);
    CHECK(mc.n_gens() == 54);
    CHECK(mc.n_scenarios() == 11);
    CHECK(validate_case(mc).ok());
    int d59 = -1, d119 = -1;
    for (int l = 0; l < mc.n_loads(); ++l) {
        if (mc.loads[l].name == "d59") d59 = l;
        if (mc.loads[l].name == "d119") d119 = l;
    }
    REQUIRE(d59 >= 0);
    REQUIRE(d119 >= 0);
    CHECK(mc.loads[d59].base_demand == mc.loads[d119].base_demand);
    CHECK(mc.loads[d59].bus == mc.loads[d119].bus);
    for (const auto& s : mc.scenarios) {
        CHECK(s.exceed_rate == 1.2);
        // d119 always moves against every other load
        if (s.load_fluctuation[d119] != 0.0)
            CHECK(s.load_fluctuation[d119] * s.load_fluctuation[d59] < 0);
    }
    double eps = 0;
    for (const auto& s : mc.scenarios) eps += s.probability;
    CHECK(eps < 1.0);
}

TEST_CASE("validation findings") {
    auto ok = testutil::ring3();
    CHECK(validate_case(ok).ok());

    auto mc = ok;
    mc.lines[0].to_bus = 7;
    CHECK(has(validate_case(mc).errors, "dangling-bus"));

    mc = ok;
    mc.loads[0].base_demand = -1;
    CHECK(!validate_case(mc).ok());

    mc = ok;
    mc.scenarios[0].probability = 1.5;
    CHECK(!validate_case(mc).ok());

    mc = ok;
    mc.lines[0].reactance = 0;
    CHECK(has(validate_case(mc).errors, "line-reactance"));

    mc = ok;
    mc.scenarios[0].c_redispatch_up.pop_back();
    CHECK(has(validate_case(mc).errors, "redispatch-size"));

    // cutting two ring lines islands a bus
    mc = ok;
    mc.scenarios[0].outages = {{0, 1}, {1, 1}};
    CHECK(has(validate_case(mc).errors, "islanded"));

    mc = ok;
    mc.loads[0].c_shed = 5;  // below the energy bids
    auto r = validate_case(mc);
    CHECK(r.ok());
    CHECK(has(r.warnings, "cheap-shedding"));
}

TEST_CASE("re-dispatch groups") {
    auto mc = fixture_twobus();
    auto g = uniform_redispatch_groups(mc);
    CHECK(g.assumption_holds);
    CHECK(g.groups.size() == 2);
    mc.scenarios[0].c_redispatch_up[2] += 1;  // G3 no longer priced like G2
    g = uniform_redispatch_groups(mc);
    CHECK(!g.assumption_holds);
    CHECK(g.violating_buses == std::vector<int>{1});
}

TEST_CASE("circuits left after outages") {
    auto mc = fixture_twobus();
    CHECK(circuits_in_service(mc, -1) == std::vector<int>{2});
    CHECK(circuits_in_service(mc, 0) == std::vector<int>{1});
    CHECK(circuits_in_service(mc, 3) == std::vector<int>{2});
}
