#pragma once

#include <string>
#include <vector>

#include "reserveflow/clearing.hpp"
#include "reserveflow/execution.hpp"

namespace reserveflow {

struct SweepRange {
    double from = 0.0, to = 0.0;
    int count = 1;
    std::vector<double> values() const;
};
SweepRange parse_range(const std::string& text);  // "a:b:n", inclusive, n >= 1

// Parameter paths:
//   loads.<name>.fluctuation_level   max_k |pi_k| / d, keeping each scenario's sign pattern
//   loads.<name>.base_demand
//   lines.<id>.capacity
//   generators.<name>.c_energy
//   scenarios.exceed_rate            every scenario
MarketCase apply_parameter(const MarketCase& mc, const std::string& path, double value);

struct SweepPoint {
    double value = 0.0;
    bool solved = false;
    std::string error;
    double objective = 0.0;
    std::vector<double> eta_g, eta_d, eta_up, eta_down;
    std::vector<double> fluctuation_payment;
};

std::vector<SweepPoint> run_sweep(const MarketCase& mc, const std::string& path, const SweepRange& range,
                                  const SolverOptions& opt = default_solver_options(),
                                  Execution ex = Execution::parallel);

// Long form: parameter,value,quantity,resource,amount. Unsolved points get one
// "status" row carrying the error.
std::string sweep_csv(const MarketCase& mc, const std::string& path, const std::vector<SweepPoint>& points);

}  // namespace reserveflow
