#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reserveflow {

struct Bus {
    int id = 0;
    std::string name;
    bool operator==(const Bus&) const = default;
};

struct Line {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double reactance = 0.0;  // per unit
    double capacity = 0.0;   // MW, all circuits together
    int parallel_count = 1;
    bool operator==(const Line&) const = default;
};

struct Generator {
    int id = 0;
    std::string name;
    int bus = 0;
    double g_min = 0.0, g_max = 0.0;
    double ru_max = 0.0, rd_max = 0.0;
    double c_energy = 0.0, c_ru = 0.0, c_rd = 0.0;
    bool operator==(const Generator&) const = default;
};

struct Load {
    int id = 0;
    std::string name;
    int bus = 0;
    double base_demand = 0.0;
    double c_shed = 0.0;
    bool operator==(const Load&) const = default;
};

struct LineOutage {
    int line = 0;
    int circuits = 1;
    bool operator==(const LineOutage&) const = default;
};

struct Scenario {
    int id = 0;
    std::string name;
    double probability = 0.0;
    std::vector<LineOutage> outages;
    std::vector<double> load_fluctuation;   // per load, MW
    double exceed_rate = 1.0;
    std::vector<double> c_redispatch_up;    // per generator
    std::vector<double> c_redispatch_down;  // per generator
    bool operator==(const Scenario&) const = default;
};

struct MarketCase {
    std::string name;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<Load> loads;
    std::vector<Scenario> scenarios;
    int slack_bus = 0;
    bool operator==(const MarketCase&) const = default;

    int n_buses() const { return static_cast<int>(buses.size()); }
    int n_lines() const { return static_cast<int>(lines.size()); }
    int n_gens() const { return static_cast<int>(generators.size()); }
    int n_loads() const { return static_cast<int>(loads.size()); }
    int n_scenarios() const { return static_cast<int>(scenarios.size()); }

    // Scenario demand d + pi_k for one load.
    double scenario_demand(int k, int l) const {
        return loads[l].base_demand + scenarios[k].load_fluctuation[l];
    }
};

struct Finding {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> errors;
    std::vector<Finding> warnings;
    bool ok() const { return errors.empty(); }
    std::string summary() const;
};

ValidationReport validate_case(const MarketCase& mc);

struct RedispatchGroups {
    std::vector<std::vector<int>> groups;  // generator indices
    bool assumption_holds = true;          // one group per bus
    std::vector<int> violating_buses;
};

RedispatchGroups uniform_redispatch_groups(const MarketCase& mc);

// Circuits left in service on each line for scenario k (k < 0: base case).
std::vector<int> circuits_in_service(const MarketCase& mc, int k);

// Buses unreachable from the slack bus over lines with circuits left.
std::vector<int> islanded_buses(const MarketCase& mc, int k);

}  // namespace reserveflow
