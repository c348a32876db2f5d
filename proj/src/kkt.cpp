#include <algorithm>
#include <cmath>

#include "reserveflow/lp.hpp"

namespace reserveflow {

double KktResiduals::worst() const { return std::max({primal, dual, stationarity, complementarity, gap}); }

namespace {

double row_value(const LpRow& r, const std::vector<double>& x) {
    double a = 0.0;
    for (std::size_t t = 0; t < r.index.size(); ++t) a += r.value[t] * x[r.index[t]];
    return a;
}

}  // namespace

KktResiduals check_kkt(const LpProblem& p, const LpSolution& s) {
    KktResiduals k;
    const int n = p.n_vars();
    std::vector<double> grad(p.cost);
    double cmax = 0.0;
    for (double c : p.cost) cmax = std::max(cmax, std::abs(c));
    const double obj = p.objective(s.x);
    double dobj = 0.0;
    std::vector<double> comp;

    for (int i = 0; i < p.n_eq(); ++i) {
        const auto& r = p.eq_rows[i];
        k.primal = std::max(k.primal, std::abs(row_value(r, s.x) - r.rhs) / (1.0 + std::abs(r.rhs)));
        for (std::size_t t = 0; t < r.index.size(); ++t) grad[r.index[t]] += r.value[t] * s.eq_duals[i];
        dobj -= r.rhs * s.eq_duals[i];
    }
    for (int i = 0; i < p.n_ub(); ++i) {
        const auto& r = p.ub_rows[i];
        const double slack = r.rhs - row_value(r, s.x);
        const double z = s.ub_duals[i];
        k.primal = std::max(k.primal, std::max(0.0, -slack) / (1.0 + std::abs(r.rhs)));
        k.dual = std::max(k.dual, -z);
        comp.push_back(std::abs(z * slack));
        for (std::size_t t = 0; t < r.index.size(); ++t) grad[r.index[t]] += r.value[t] * z;
        dobj -= r.rhs * z;
    }
    for (int j = 0; j < n; ++j) {
        const double zl = s.lower_duals[j], zu = s.upper_duals[j];
        k.dual = std::max({k.dual, -zl, -zu});
        grad[j] += zu - zl;
        if (std::isfinite(p.lower[j])) {
            k.primal = std::max(k.primal, std::max(0.0, p.lower[j] - s.x[j]) / (1.0 + std::abs(p.lower[j])));
            comp.push_back(std::abs(zl * (s.x[j] - p.lower[j])));
            dobj += p.lower[j] * zl;
        } else {
            k.dual = std::max(k.dual, std::abs(zl));  // no bound, no multiplier
        }
        if (std::isfinite(p.upper[j])) {
            k.primal = std::max(k.primal, std::max(0.0, s.x[j] - p.upper[j]) / (1.0 + std::abs(p.upper[j])));
            comp.push_back(std::abs(zu * (p.upper[j] - s.x[j])));
            dobj -= p.upper[j] * zu;
        } else {
            k.dual = std::max(k.dual, std::abs(zu));
        }
    }
    for (double g : grad) k.stationarity = std::max(k.stationarity, std::abs(g) / (1.0 + cmax));
    for (double c : comp) k.complementarity = std::max(k.complementarity, c / (1.0 + std::abs(obj)));
    k.gap = std::abs(obj - dobj) / (1.0 + std::abs(obj));
    return k;
}

std::vector<std::string> degenerate_constraints(const LpProblem& p, const LpSolution& s, double tol) {
    std::vector<std::string> out;
    for (int i = 0; i < p.n_ub(); ++i) {
        const double slack = p.ub_rows[i].rhs - row_value(p.ub_rows[i], s.x);
        if (std::abs(slack) < tol && std::abs(s.ub_duals[i]) < tol) out.push_back(p.ub_rows[i].name);
    }
    for (int j = 0; j < p.n_vars(); ++j) {
        if (p.lower[j] == p.upper[j]) continue;  // fixed variables carry no choice
        if (std::isfinite(p.lower[j]) && std::abs(s.x[j] - p.lower[j]) < tol && std::abs(s.lower_duals[j]) < tol)
            out.push_back(p.var_names[j] + ".lower");
        if (std::isfinite(p.upper[j]) && std::abs(p.upper[j] - s.x[j]) < tol && std::abs(s.upper_duals[j]) < tol)
            out.push_back(p.var_names[j] + ".upper");
    }
    return out;
}

}  // namespace reserveflow
