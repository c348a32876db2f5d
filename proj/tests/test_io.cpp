#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cases.hpp"
#include "reserveflow/errors.hpp"
#include "reserveflow/io.hpp"
#include "reserveflow/reports.hpp"
#include "reserveflow/sweep.hpp"

using namespace reserveflow;

namespace {
std::string replace(std::string s, const std::string& from, const std::string& to) {
    auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}
}  // namespace

TEST_CASE("bundled two-bus case file equals the fixture") {
    auto mc = parse_case(data_dir() / "twobus.case.json");
    CHECK(mc == fixture_twobus());
    CHECK(mc.scenarios[0].probability == 0.06);
    CHECK(mc.scenarios[4].probability == 0.18);
}

TEST_CASE("case JSON round trip") {
    for (const auto& mc : {fixture_twobus(), testutil::ring3()}) CHECK(parse_case_text(case_to_json(mc)) == mc);
    auto tmp = std::filesystem::temp_directory_path() / "rf_case_roundtrip.json";
    write_case(fixture_ieee118(), tmp);
    CHECK(parse_case(tmp) == fixture_ieee118());
    std::filesystem::remove(tmp);
}

TEST_CASE("text in a numeric field reports line and column") {
    auto text = replace(case_to_json(fixture_twobus()), "\"g_max\": 16.0", "\"g_max\": \"lots\"");
    try {
        parse_case_text(text, "bad.json");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        // locate the offending value independently
        auto at = text.find("\"lots\"");
        int line = 1 + int(std::count(text.begin(), text.begin() + at, '\n'));
        int col = int(at - text.rfind('\n', at));
        CHECK(e.line == line);
        CHECK(e.column == col);
        CHECK(std::string(e.what()).find("g_max") != std::string::npos);
    }
}

TEST_CASE("malformed JSON") {
    try {
        parse_case_text("{\n  \"name\": \"x\",\n  oops\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("schema and validation errors") {
    auto good = case_to_json(fixture_twobus());
    CHECK_THROWS_AS(parse_case_text(replace(good, "\"reactance\"", "\"reactanse\"")), SchemaError);
    CHECK_THROWS_AS(parse_case_text(replace(good, "\"schema_version\": 1", "\"schema_version\": 9")), SchemaError);
    CHECK_THROWS_AS(parse_case_text(replace(good, "\"demand\": 6.0", "\"demand\": -6.0")), ValidationError);
    CHECK_THROWS_AS(parse_case(data_dir() / "no_such_case.json"), IoError);
}

TEST_CASE("matpower reader") {
    const char* text = R"(function mpc = tiny
% comment line
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0;   % slack
	2	1	50	0;
];
mpc.gen = [
	1	60	0	300	-300	1	100	1	200	0;
];
mpc.branch = [
	1	2	0.01	0.1	0	0	0	0	0	0	1;
];
mpc.gencost = [
	2	0	0	3	0.01	20	0;
];
)";
    auto m = parse_matpower(text);
    CHECK(m.base_mva == 100);
    REQUIRE(m.bus.size() == 2);
    CHECK(m.bus[1][2] == 50);
    REQUIRE(m.gen.size() == 1);
    CHECK(m.gencost[0][5] == 20);
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [ 1 x 2 ];"), ParseError);
    CHECK_THROWS_AS(parse_matpower("mpc.gen = [ 1 2 ];"), SchemaError);
    CHECK_THROWS_AS(read_matpower("/nonexistent/case.m"), MissingData);
}

TEST_CASE("committed calibration") {
    auto rec = load_calibration(data_dir() / "twobus_calibration.json");
    CHECK(rec.params.line_capacity == 2.0);
    CHECK(rec.params.exceed_rate == 1.2);
    // quantities fit; the published energy prices do not (see README)
    auto fit = calibration_fit(rec.params);
    CHECK(fit.quantity_residual < 0.05);
    CHECK(std::abs(fit.quantity_residual - rec.quantity_residual) < 1e-6);
    CHECK(std::abs(fit.price_residual - rec.price_residual) < 1e-6);
    CHECK(!rec.passed);
}

TEST_CASE("sweep ranges and parameters") {
    auto r = parse_range("0.01:0.05:5");
    auto v = r.values();
    REQUIRE(v.size() == 5);
    CHECK(v[2] == doctest::Approx(0.03));
    CHECK(parse_range("2:2:1").values() == std::vector<double>{2});
    CHECK_THROWS_AS(parse_range("1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("1:2:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("a:2:3"), std::invalid_argument);

    auto mc = fixture_twobus();
    auto m = apply_parameter(mc, "loads.d2.fluctuation_level", 0.5);
    double peak = 0;
    for (const auto& s : m.scenarios) peak = std::max(peak, std::abs(s.load_fluctuation[1]));
    CHECK(peak == doctest::Approx(7.5));
    CHECK(m.scenarios[1].load_fluctuation[1] / m.scenarios[2].load_fluctuation[1] ==
          doctest::Approx(7.0 / 2.0));  // sign pattern kept
    CHECK(apply_parameter(mc, "lines.1.capacity", 3).lines[0].capacity == 3);
    CHECK(apply_parameter(mc, "scenarios.exceed_rate", 1.4).scenarios[4].exceed_rate == 1.4);
    CHECK_THROWS_AS(apply_parameter(mc, "loads.d9.base_demand", 1), std::invalid_argument);
    CHECK_THROWS_AS(apply_parameter(mc, "weather", 1), std::invalid_argument);
}

TEST_CASE("sweep output is deterministic") {
    auto mc = fixture_twobus();
    auto a = run_sweep(mc, "loads.d2.fluctuation_level", parse_range("0.3:0.6:3"), default_solver_options(),
                       Execution::serial);
    auto b = run_sweep(mc, "loads.d2.fluctuation_level", parse_range("0.3:0.6:3"), default_solver_options(),
                       Execution::parallel);
    auto ca = sweep_csv(mc, "loads.d2.fluctuation_level", a);
    CHECK(ca == sweep_csv(mc, "loads.d2.fluctuation_level", b));
    CHECK(ca.rfind("parameter,value,quantity,resource,amount\n", 0) == 0);
    for (const auto& p : a) CHECK(p.solved);
}

TEST_CASE("report layouts") {
    auto mc = fixture_twobus();
    auto sol = solve_clearing(mc);
    auto p = price(sol, mc);
    auto led = settle(sol, p, mc);
    auto md = clearing_table(mc, sol, p, led, Format::md);
    CHECK(md.find("| generator | bus | g | r_U | r_D | eta_g | eta_U | eta_D |") == 0);
    CHECK(md.find("| G1 | bus1 | 8.000 | 2.400 | 0.800 |") != std::string::npos);
    auto csv = clearing_table(mc, sol, p, led, Format::csv);
    CHECK(csv.find("generator,bus,g,r_U,r_D,eta_g,eta_U,eta_D\n") == 0);
    CHECK(price_table(mc, p, Format::csv).find("bus,omega_0,omega_S1") == 0);
    CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}
