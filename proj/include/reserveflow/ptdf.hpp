#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "reserveflow/execution.hpp"
#include "reserveflow/model.hpp"

namespace reserveflow {

struct ShiftFactors {
    Eigen::MatrixXd matrix;  // lines x buses, slack column zero
    int slack_bus = 0;
};

// Topology of one operating state: base (k = -1) or scenario k.
struct ScenarioNetwork {
    ShiftFactors shift;
    Eigen::VectorXd capacity;       // f or f_k, MW
    std::vector<bool> in_service;   // false when every circuit is out
};

struct PhaseAngleSystem {
    Eigen::MatrixXd B;  // full nodal susceptance, buses x buses
    Eigen::MatrixXd F;  // lines x buses, flow = F theta
    int slack_bus = 0;

    // B with the slack row and column removed.
    Eigen::MatrixXd reduced() const;
};

// Base plus every scenario, computed once per case.
struct NetworkModel {
    ScenarioNetwork base;
    std::vector<ScenarioNetwork> scenarios;
};

ShiftFactors base_shift_factors(const MarketCase& mc);
ScenarioNetwork scenario_network(const MarketCase& mc, int k);  // k = -1 for base
PhaseAngleSystem phase_angle_system(const MarketCase& mc, std::optional<int> k = std::nullopt);
NetworkModel build_network(const MarketCase& mc, Execution ex = Execution::parallel);

// Net injection g - d per bus from per-resource vectors.
Eigen::VectorXd bus_injection(const MarketCase& mc, const std::vector<double>& gen,
                              const std::vector<double>& load);

}  // namespace reserveflow
