#include <cmath>
#include <optional>

#include "lp_internal.hpp"
#include "reserveflow/errors.hpp"

namespace reserveflow {

namespace {

using detail::IpmResult;

// Fallback acceptance for an IPM that stalls short of its target; matches the
// feasibility/stationarity bound promised to callers.
constexpr double kAccept = 1e-8;

std::optional<LpSolution> try_solve(const LpProblem& p, const SolverOptions& opt, std::string& why) {
    auto pre = detail::presolve(p, opt.presolve);
    if (pre.infeasible) {
        why = pre.reason;
        return std::nullopt;
    }
    IpmResult r;
    if (pre.reduced.n == 0) {
        r.outcome = IpmResult::Outcome::converged;
        r.x = r.zl = r.zu = Eigen::VectorXd(0);
        r.y = Eigen::VectorXd(0);
        r.z = Eigen::VectorXd(0);
    } else {
        detail::IpmOptions io;
        io.tolerance = opt.tolerance;
        io.accept = std::max(opt.tolerance, kAccept);
        io.max_iterations = opt.max_iterations;
        io.execution = opt.execution;
        r = detail::interior_point(pre.reduced, io);
    }
    const bool usable = r.x.size() == pre.reduced.n;
    const bool ok = usable && (r.outcome == IpmResult::Outcome::converged ||
                               (r.primal_res <= kAccept && r.dual_res <= kAccept && r.gap <= kAccept));
    if (!ok) {
        why = "interior point stopped without convergence";
        return std::nullopt;
    }
    auto sol = detail::postsolve(p, pre, r);
    sol.method = "interior-point (centered duals)";
    return sol;
}

double rhs_scale(const LpProblem& p) {
    double m = 0.0;
    for (const auto& r : p.eq_rows) m = std::max(m, std::abs(r.rhs));
    for (const auto& r : p.ub_rows) m = std::max(m, std::abs(r.rhs));
    return m;
}

// Phase one: minimize total violation. A positive optimum proves infeasibility and its
// duals form a Farkas certificate for the original rows.
std::optional<LpCertificate> farkas(const LpProblem& p, const SolverOptions& opt) {
    const int n = p.n_vars();
    for (int j = 0; j < n; ++j)
        if (p.lower[j] > p.upper[j]) {
            LpCertificate c;
            c.eq.assign(p.n_eq(), 0.0);
            c.ub.assign(p.n_ub(), 0.0);
            c.lower.assign(n, 0.0);
            c.upper.assign(n, 0.0);
            c.lower[j] = c.upper[j] = 1.0;
            return c;
        }
    LpProblem q;
    for (int j = 0; j < n; ++j) q.add_variable(p.var_names[j], 0.0, p.lower[j], p.upper[j]);
    for (const auto& r : p.eq_rows) {
        auto idx = r.index;
        auto val = r.value;
        idx.push_back(q.add_variable("art+" + r.name, 1.0, 0.0, kInf));
        val.push_back(1.0);
        idx.push_back(q.add_variable("art-" + r.name, 1.0, 0.0, kInf));
        val.push_back(-1.0);
        q.add_eq(r.name, std::move(idx), std::move(val), r.rhs);
    }
    for (const auto& r : p.ub_rows) {
        auto idx = r.index;
        auto val = r.value;
        idx.push_back(q.add_variable("art-" + r.name, 1.0, 0.0, kInf));
        val.push_back(-1.0);
        q.add_ub(r.name, std::move(idx), std::move(val), r.rhs);
    }
    std::string why;
    auto s = try_solve(q, opt, why);
    if (!s) throw NumericalFailure("phase-one problem failed: " + why);
    if (s->objective <= 1e-7 * (1.0 + rhs_scale(p))) return std::nullopt;
    LpCertificate c;
    c.eq = s->eq_duals;
    c.ub = s->ub_duals;
    c.lower.assign(s->lower_duals.begin(), s->lower_duals.begin() + n);
    c.upper.assign(s->upper_duals.begin(), s->upper_duals.begin() + n);
    return c;
}

// A boxed direction LP; a negative optimum is a recession direction of decrease.
std::optional<std::vector<double>> unbounded_ray(const LpProblem& p, const SolverOptions& opt) {
    const int n = p.n_vars();
    LpProblem q;
    double cmax = 0.0;
    for (int j = 0; j < n; ++j) {
        q.add_variable(p.var_names[j], p.cost[j], std::isfinite(p.lower[j]) ? 0.0 : -1.0,
                       std::isfinite(p.upper[j]) ? 0.0 : 1.0);
        cmax = std::max(cmax, std::abs(p.cost[j]));
    }
    for (const auto& r : p.eq_rows) q.add_eq(r.name, r.index, r.value, 0.0);
    for (const auto& r : p.ub_rows) q.add_ub(r.name, r.index, r.value, 0.0);
    std::string why;
    auto s = try_solve(q, opt, why);
    if (!s) throw NumericalFailure("direction problem failed: " + why);
    if (s->objective < -1e-9 * (1.0 + cmax)) return s->x;
    return std::nullopt;
}

}  // namespace

LpSolution solve(const LpProblem& p, const SolverOptions& opt) {
    p.check();
    std::string why;
    if (auto s = try_solve(p, opt, why)) return *std::move(s);

    LpSolution out;
    out.method = "interior-point";
    if (auto cert = farkas(p, opt)) {
        out.status = LpStatus::Infeasible;
        out.certificate = *std::move(cert);
        return out;
    }
    if (auto ray = unbounded_ray(p, opt)) {
        out.status = LpStatus::Unbounded;
        out.certificate.ray = *std::move(ray);
        return out;
    }
    throw NumericalFailure("LP status could not be certified: " + why);
}

}  // namespace reserveflow
