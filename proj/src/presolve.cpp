#include <cmath>
#include <string>

#include "lp_internal.hpp"

namespace reserveflow::detail {

namespace {

double row_tol(double rhs) { return 1e-9 * (1.0 + std::abs(rhs)); }

// rhs minus the contribution of fixed variables; counts the free ones.
struct RowState {
    double rhs = 0.0;
    int alive = 0;
    int last = -1;
    double last_coef = 0.0;
};

RowState row_state(const LpRow& r, const std::vector<char>& fixed, const std::vector<double>& fv) {
    RowState st;
    st.rhs = r.rhs;
    for (std::size_t t = 0; t < r.index.size(); ++t) {
        const int j = r.index[t];
        const double a = r.value[t];
        if (a == 0.0) continue;
        if (fixed[j]) {
            st.rhs -= a * fv[j];
        } else {
            ++st.alive;
            st.last = j;
            st.last_coef = a;
        }
    }
    return st;
}

}  // namespace

Presolved presolve(const LpProblem& p, bool enabled) {
    const int n = p.n_vars();
    Presolved pr;
    pr.fixed.assign(n, 0);
    pr.fixed_value.assign(n, 0.0);
    pr.lo_src.assign(n, -1);
    pr.hi_src.assign(n, -1);
    pr.lo_coef.assign(n, 0.0);
    pr.hi_coef.assign(n, 0.0);
    pr.eq_src.assign(n, -1);
    pr.eq_coef.assign(n, 0.0);
    std::vector<double> lo = p.lower, hi = p.upper;
    std::vector<char> eq_alive(p.n_eq(), 1), ub_alive(p.n_ub(), 1);

    auto fail = [&](std::string why, int var = -1) {
        pr.infeasible = true;
        pr.reason = std::move(why);
        pr.infeasible_var = var;
        return pr;
    };

    for (int j = 0; j < n; ++j)
        if (lo[j] > hi[j]) return fail("bounds of " + p.var_names[j] + " cross", j);

    bool changed = enabled;
    while (changed) {
        changed = false;
        for (int j = 0; j < n; ++j) {
            if (pr.fixed[j]) continue;
            if (lo[j] > hi[j] + 1e-9 * (1.0 + std::abs(hi[j])))
                return fail("implied bounds of " + p.var_names[j] + " cross", j);
            if (std::isfinite(lo[j]) && std::isfinite(hi[j]) && hi[j] - lo[j] <= 1e-12 * (1.0 + std::abs(lo[j]))) {
                pr.fixed[j] = 1;
                pr.fixed_value[j] = lo[j] == hi[j] ? lo[j] : 0.5 * (lo[j] + hi[j]);
                pr.fix_order.push_back(j);
                changed = true;
            }
        }
        for (int i = 0; i < p.n_ub(); ++i) {
            if (!ub_alive[i]) continue;
            auto st = row_state(p.ub_rows[i], pr.fixed, pr.fixed_value);
            if (st.alive == 0) {
                if (st.rhs < -row_tol(p.ub_rows[i].rhs)) return fail("row " + p.ub_rows[i].name + " cannot hold");
                ub_alive[i] = 0;
                changed = true;
            } else if (st.alive == 1) {
                const int j = st.last;
                const double a = st.last_coef, bound = st.rhs / a;
                if (a > 0) {
                    if (bound < hi[j]) { hi[j] = bound; pr.hi_src[j] = i; pr.hi_coef[j] = a; }
                } else {
                    if (bound > lo[j]) { lo[j] = bound; pr.lo_src[j] = i; pr.lo_coef[j] = a; }
                }
                ub_alive[i] = 0;
                changed = true;
            }
        }
        for (int i = 0; i < p.n_eq(); ++i) {
            if (!eq_alive[i]) continue;
            auto st = row_state(p.eq_rows[i], pr.fixed, pr.fixed_value);
            if (st.alive == 0) {
                if (std::abs(st.rhs) > row_tol(p.eq_rows[i].rhs)) return fail("row " + p.eq_rows[i].name + " cannot hold");
                eq_alive[i] = 0;
                changed = true;
            } else if (st.alive == 1) {
                const int j = st.last;
                const double v = st.rhs / st.last_coef;
                if (v < lo[j] - 1e-9 * (1.0 + std::abs(lo[j])) || v > hi[j] + 1e-9 * (1.0 + std::abs(hi[j])))
                    return fail("row " + p.eq_rows[i].name + " pins " + p.var_names[j] + " outside its bounds", j);
                pr.fixed[j] = 1;
                pr.fixed_value[j] = v;
                pr.fix_order.push_back(j);
                pr.eq_src[j] = i;
                pr.eq_coef[j] = st.last_coef;
                eq_alive[i] = 0;
                changed = true;
            }
        }
    }

    // Reduced problem.
    std::vector<int> col_map(n, -1);
    for (int j = 0; j < n; ++j)
        if (!pr.fixed[j]) {
            col_map[j] = static_cast<int>(pr.kept_vars.size());
            pr.kept_vars.push_back(j);
        }
    const int nr = static_cast<int>(pr.kept_vars.size());
    auto& R = pr.reduced;
    R.n = nr;
    R.c.resize(nr);
    R.lo.resize(nr);
    R.hi.resize(nr);
    for (int r = 0; r < nr; ++r) {
        const int j = pr.kept_vars[r];
        R.c[r] = p.cost[j];
        R.lo[r] = lo[j];
        R.hi[r] = hi[j];
    }

    auto build = [&](const std::vector<LpRow>& rows, const std::vector<char>& alive, std::vector<int>& kept,
                     kernels::RowMatrix& M, Eigen::VectorXd& rhs) {
        std::vector<Eigen::Triplet<double>> trip;
        std::vector<double> rv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!alive[i]) continue;
            const int r = static_cast<int>(kept.size());
            kept.push_back(static_cast<int>(i));
            double b = rows[i].rhs;
            for (std::size_t t = 0; t < rows[i].index.size(); ++t) {
                const int j = rows[i].index[t];
                const double a = rows[i].value[t];
                if (a == 0.0) continue;
                if (pr.fixed[j]) b -= a * pr.fixed_value[j];
                else trip.emplace_back(r, col_map[j], a);
            }
            rv.push_back(b);
        }
        M.resize(static_cast<int>(kept.size()), nr);
        M.setFromTriplets(trip.begin(), trip.end());
        M.makeCompressed();
        rhs = Eigen::Map<Eigen::VectorXd>(rv.data(), static_cast<int>(rv.size()));
    };
    build(p.eq_rows, eq_alive, pr.kept_eq, R.A, R.b);
    build(p.ub_rows, ub_alive, pr.kept_ub, R.G, R.h);
    return pr;
}

LpSolution postsolve(const LpProblem& p, const Presolved& pre, const IpmResult& r) {
    const int n = p.n_vars();
    LpSolution s;
    s.status = LpStatus::Optimal;
    s.x.assign(n, 0.0);
    s.eq_duals.assign(p.n_eq(), 0.0);
    s.ub_duals.assign(p.n_ub(), 0.0);
    s.lower_duals.assign(n, 0.0);
    s.upper_duals.assign(n, 0.0);
    s.iterations = r.iterations;

    for (int j = 0; j < n; ++j)
        if (pre.fixed[j]) s.x[j] = pre.fixed_value[j];
    for (std::size_t k = 0; k < pre.kept_vars.size(); ++k) s.x[pre.kept_vars[k]] = r.x[k];
    for (std::size_t k = 0; k < pre.kept_eq.size(); ++k) s.eq_duals[pre.kept_eq[k]] = r.y[k];
    for (std::size_t k = 0; k < pre.kept_ub.size(); ++k) s.ub_duals[pre.kept_ub[k]] = r.z[k];

    auto to_lower = [&](int j, double v) {
        if (v == 0.0) return;
        if (pre.lo_src[j] < 0) s.lower_duals[j] += v;
        else s.ub_duals[pre.lo_src[j]] += v / (-pre.lo_coef[j]);
    };
    auto to_upper = [&](int j, double v) {
        if (v == 0.0) return;
        if (pre.hi_src[j] < 0) s.upper_duals[j] += v;
        else s.ub_duals[pre.hi_src[j]] += v / pre.hi_coef[j];
    };
    for (std::size_t k = 0; k < pre.kept_vars.size(); ++k) {
        const int j = pre.kept_vars[k];
        to_lower(j, r.zl[k]);
        to_upper(j, r.zu[k]);
    }

    if (!pre.fix_order.empty()) {
        // Column lists of the original rows, for reduced costs of fixed variables.
        std::vector<std::vector<std::pair<int, double>>> eq_cols(n), ub_cols(n);
        for (int i = 0; i < p.n_eq(); ++i)
            for (std::size_t t = 0; t < p.eq_rows[i].index.size(); ++t)
                eq_cols[p.eq_rows[i].index[t]].emplace_back(i, p.eq_rows[i].value[t]);
        for (int i = 0; i < p.n_ub(); ++i)
            for (std::size_t t = 0; t < p.ub_rows[i].index.size(); ++t)
                ub_cols[p.ub_rows[i].index[t]].emplace_back(i, p.ub_rows[i].value[t]);
        // Reverse order: a variable fixed later may feed a row that fixed an earlier one.
        for (auto it = pre.fix_order.rbegin(); it != pre.fix_order.rend(); ++it) {
            const int j = *it;
            double rc = p.cost[j];
            for (auto [i, a] : eq_cols[j]) rc += a * s.eq_duals[i];
            for (auto [i, a] : ub_cols[j]) rc += a * s.ub_duals[i];
            if (pre.eq_src[j] >= 0) s.eq_duals[pre.eq_src[j]] = -rc / pre.eq_coef[j];
            else if (rc >= 0) to_lower(j, rc);
            else to_upper(j, -rc);
        }
    }
    s.objective = p.objective(s.x);
    return s;
}

}  // namespace reserveflow::detail
