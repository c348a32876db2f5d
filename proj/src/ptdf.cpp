#include "reserveflow/ptdf.hpp"

#include <cmath>
#include <string>

#include "reserveflow/errors.hpp"

namespace reserveflow {

namespace {

void require_connected(const MarketCase& mc, int k) {
    auto isl = islanded_buses(mc, k);
    if (isl.empty()) return;
    std::string msg = (k < 0 ? std::string("base network") : "scenario " + mc.scenarios[k].name) +
                      " islands buses";
    for (int b : isl) msg += " " + std::to_string(b);
    throw IslandedNetwork(msg, isl);
}

// Susceptance per line after outages; zero for a line with no circuits left.
Eigen::VectorXd line_susceptance(const MarketCase& mc, const std::vector<int>& left) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mc.n_lines());
    for (int i = 0; i < mc.n_lines(); ++i) {
        const auto& ln = mc.lines[i];
        if (left[i] <= 0) continue;
        double x = ln.reactance * double(ln.parallel_count) / double(left[i]);
        b[i] = 1.0 / x;
    }
    return b;
}

PhaseAngleSystem assemble(const MarketCase& mc, const std::vector<int>& left) {
    const int nb = mc.n_buses(), nl = mc.n_lines();
    PhaseAngleSystem sys;
    sys.slack_bus = mc.slack_bus;
    sys.B = Eigen::MatrixXd::Zero(nb, nb);
    sys.F = Eigen::MatrixXd::Zero(nl, nb);
    Eigen::VectorXd b = line_susceptance(mc, left);
    for (int i = 0; i < nl; ++i) {
        if (b[i] == 0.0) continue;
        int f = mc.lines[i].from_bus, t = mc.lines[i].to_bus;
        sys.B(f, f) += b[i];
        sys.B(t, t) += b[i];
        sys.B(f, t) -= b[i];
        sys.B(t, f) -= b[i];
        sys.F(i, f) = b[i];
        sys.F(i, t) = -b[i];
    }
    return sys;
}

Eigen::MatrixXd drop_column(const Eigen::MatrixXd& m, int c) {
    Eigen::MatrixXd out(m.rows(), m.cols() - 1);
    if (c > 0) out.leftCols(c) = m.leftCols(c);
    if (c < m.cols() - 1) out.rightCols(m.cols() - 1 - c) = m.rightCols(m.cols() - 1 - c);
    return out;
}

ShiftFactors shift_from_system(const PhaseAngleSystem& sys) {
    const int nb = static_cast<int>(sys.B.rows());
    const int s = sys.slack_bus;
    ShiftFactors sf;
    sf.slack_bus = s;
    sf.matrix = Eigen::MatrixXd::Zero(sys.F.rows(), nb);
    if (nb <= 1) return sf;
    Eigen::MatrixXd Br = sys.reduced();
    Eigen::MatrixXd Fr = drop_column(sys.F, s);
    // S_r = F_r B_r^{-1}; B_r is symmetric so solve B_r X = F_r^T.
    Eigen::LLT<Eigen::MatrixXd> llt(Br);
    Eigen::MatrixXd Sr = llt.solve(Fr.transpose()).transpose();
    for (int b = 0, c = 0; b < nb; ++b) {
        if (b == s) continue;
        sf.matrix.col(b) = Sr.col(c++);
    }
    sf.matrix = sf.matrix.unaryExpr([](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; });
    return sf;
}

}  // namespace

Eigen::MatrixXd PhaseAngleSystem::reduced() const {
    const int nb = static_cast<int>(B.rows());
    Eigen::MatrixXd r(nb - 1, nb - 1);
    for (int i = 0, ri = 0; i < nb; ++i) {
        if (i == slack_bus) continue;
        for (int j = 0, rj = 0; j < nb; ++j) {
            if (j == slack_bus) continue;
            r(ri, rj++) = B(i, j);
        }
        ++ri;
    }
    return r;
}

PhaseAngleSystem phase_angle_system(const MarketCase& mc, std::optional<int> k) {
    int kk = k.value_or(-1);
    require_connected(mc, kk);
    return assemble(mc, circuits_in_service(mc, kk));
}

ShiftFactors base_shift_factors(const MarketCase& mc) {
    require_connected(mc, -1);
    return shift_from_system(assemble(mc, circuits_in_service(mc, -1)));
}

ScenarioNetwork scenario_network(const MarketCase& mc, int k) {
    require_connected(mc, k);
    auto left = circuits_in_service(mc, k);
    ScenarioNetwork net;
    net.shift = shift_from_system(assemble(mc, left));
    net.capacity.resize(mc.n_lines());
    net.in_service.resize(mc.n_lines());
    double rate = k < 0 ? 1.0 : mc.scenarios[k].exceed_rate;
    for (int i = 0; i < mc.n_lines(); ++i) {
        const auto& ln = mc.lines[i];
        net.in_service[i] = left[i] > 0;
        double cap = left[i] == ln.parallel_count ? ln.capacity
                                                   : ln.capacity * double(left[i]) / double(ln.parallel_count);
        net.capacity[i] = rate * cap;
    }
    return net;
}

NetworkModel build_network(const MarketCase& mc, Execution ex) {
    // Connectivity is checked up front; exceptions must not escape the parallel region.
    for (int k = -1; k < mc.n_scenarios(); ++k) require_connected(mc, k);
    NetworkModel nm;
    nm.base = scenario_network(mc, -1);
    const int K = mc.n_scenarios();
    nm.scenarios.resize(K);
    if (ex == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < K; ++k) nm.scenarios[k] = scenario_network(mc, k);
    } else {
        for (int k = 0; k < K; ++k) nm.scenarios[k] = scenario_network(mc, k);
    }
    return nm;
}

Eigen::VectorXd bus_injection(const MarketCase& mc, const std::vector<double>& gen,
                              const std::vector<double>& load) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(mc.n_buses());
    for (int j = 0; j < mc.n_gens(); ++j) p[mc.generators[j].bus] += gen[j];
    for (int l = 0; l < mc.n_loads(); ++l) p[mc.loads[l].bus] -= load[l];
    return p;
}

}  // namespace reserveflow
