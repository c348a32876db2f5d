#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reserveflow/model.hpp"

namespace reserveflow {

inline constexpr int kCaseSchemaVersion = 1;

// JSON case files. Unknown fields are rejected; see docs/case_schema.md.
MarketCase parse_case(const std::filesystem::path& path);
MarketCase parse_case_text(const std::string& text, const std::string& source = "<memory>");
std::string case_to_json(const MarketCase& mc);
void write_case(const MarketCase& mc, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

// Raw MATPOWER matrices, rows as read.
struct MatpowerData {
    double base_mva = 100.0;
    std::vector<std::vector<double>> bus, gen, branch, gencost;
};

MatpowerData read_matpower(const std::filesystem::path& path);
MatpowerData parse_matpower(const std::string& text);

std::filesystem::path data_dir();

// Two-bus example. The published tables leave the line rating, exceed rate and
// shedding price out; those come from the committed calibration file.
struct TwoBusParams {
    double line_capacity = 2.0;  // MW over both circuits
    double exceed_rate = 1.2;
    double c_shed = 60.0;
};

struct CalibrationRecord {
    TwoBusParams params;
    double quantity_residual = 0.0;  // MW
    double price_residual = 0.0;     // $/MWh and $
    bool passed = false;
    std::string note;
};

CalibrationRecord load_calibration(const std::filesystem::path& path);
void save_calibration(const CalibrationRecord& rec, const std::filesystem::path& path);

MarketCase twobus_case(const TwoBusParams& p);

// Published clearing results the two-bus parameters are fitted to.
struct CalibrationTargets {
    std::vector<double> g{8.0, 17.0, 0.0}, r_up{2.4, 1.0, 4.0}, r_down{0.8, 0.0, 0.0};
    std::vector<double> eta_g{25.4, 35.7, 35.7}, eta_up{2.0, 5.3, 5.3}, eta_down{2.0, 3.7, 3.7};
    std::vector<double> fluctuation{23.3, 91.7, -23.5};
    double quantity_tolerance = 0.05;
    double price_tolerance = 0.1;
};

struct CalibrationFit {
    TwoBusParams params;
    double quantity_residual = 0.0, price_residual = 0.0;
    std::string worst_quantity, worst_price;  // which cell sets each residual
};

// Residuals of one parameter set against the targets.
CalibrationFit calibration_fit(const TwoBusParams& p, const CalibrationTargets& t = {});

// Grid search over line capacity, exceed rate and shedding price. The best record is
// written to `out` (when not empty) before CalibrationFailed is thrown.
CalibrationRecord calibrate_twobus(const CalibrationTargets& t = {}, const std::filesystem::path& out = {});
MarketCase fixture_twobus();  // reads data/twobus_calibration.json

struct Ieee118Options {
    std::filesystem::path network_file;  // empty: data/case118.m
    std::vector<int> outage_lines{21, 55, 102};
    double outage_probability = 0.1;
    double situation_probability = 0.1;  // each of the two fluctuation situations
    double fluctuation_level = 0.03;
    std::map<std::string, double> level_override;  // per load name
    double exceed_rate = 1.2;
    double c_shed = 500.0;
    double reserve_share = 0.15;       // ru_max = rd_max = share * Pmax
    double reserve_cost_share = 0.1;   // C_U = C_D = share * C_g
    double redispatch_adder = 5.0;     // C_up = C_g + adder, C_down = C_g - adder
    double rating_floor = 100.0;       // line rating rule, MW
    double rating_factor = 0.9;
    double rating_step = 25.0;
};

MarketCase ieee118_case(const Ieee118Options& opt);
MarketCase fixture_ieee118();

}  // namespace reserveflow
