// Brute-force reference solver: enumerate every basis, keep the best feasible vertex.
// Infinite bounds are replaced by an artificial box; growing the box and watching the
// optimum move tells bounded from unbounded.
#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "reserveflow/errors.hpp"
#include "reserveflow/lp.hpp"

namespace reserveflow {

namespace {

enum class Kind { ub_row, lower, upper, art_lower, art_upper };

struct Candidate {
    Kind kind;
    int index;
};

struct Vertex {
    double objective = 0.0;
    Eigen::VectorXd x;
    std::vector<int> basis;  // candidate ids
};

long binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > 4'000'000'000L) return r;
    }
    return r;
}

struct Oracle {
    const LpProblem& p;
    int n;
    Eigen::MatrixXd Ae;  // independent equality rows
    Eigen::VectorXd be;
    std::vector<int> eq_sel;
    std::vector<Candidate> cands;
    double M = 0.0;

    explicit Oracle(const LpProblem& pp) : p(pp), n(pp.n_vars()) {
        // Greedy choice of linearly independent equality rows.
        Eigen::MatrixXd acc(0, n);
        for (int i = 0; i < p.n_eq(); ++i) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
            for (std::size_t t = 0; t < p.eq_rows[i].index.size(); ++t) r[p.eq_rows[i].index[t]] += p.eq_rows[i].value[t];
            Eigen::MatrixXd trial(acc.rows() + 1, n);
            trial << acc, r;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
            lu.setThreshold(1e-10);
            if (lu.rank() == trial.rows()) {
                acc = trial;
                eq_sel.push_back(i);
            }
        }
        Ae = acc;
        be.resize(eq_sel.size());
        for (std::size_t k = 0; k < eq_sel.size(); ++k) be[k] = p.eq_rows[eq_sel[k]].rhs;
        for (int i = 0; i < p.n_ub(); ++i) cands.push_back({Kind::ub_row, i});
        for (int j = 0; j < n; ++j) {
            cands.push_back({std::isfinite(p.lower[j]) ? Kind::lower : Kind::art_lower, j});
            cands.push_back({std::isfinite(p.upper[j]) ? Kind::upper : Kind::art_upper, j});
        }
    }

    // Row vector and rhs of a candidate, written as a'x = rhs when active.
    void row_of(const Candidate& c, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, double& rhs) const {
        row.setZero();
        switch (c.kind) {
            case Kind::ub_row: {
                const auto& r = p.ub_rows[c.index];
                for (std::size_t t = 0; t < r.index.size(); ++t) row[r.index[t]] += r.value[t];
                rhs = r.rhs;
                break;
            }
            case Kind::lower: row[c.index] = 1.0; rhs = p.lower[c.index]; break;
            case Kind::upper: row[c.index] = 1.0; rhs = p.upper[c.index]; break;
            case Kind::art_lower: row[c.index] = 1.0; rhs = -M; break;
            case Kind::art_upper: row[c.index] = 1.0; rhs = M; break;
        }
    }

    bool feasible(const Eigen::VectorXd& x) const {
        auto tol = [](double v) { return 1e-9 * (1.0 + std::abs(v)); };
        for (const auto& r : p.eq_rows) {
            double a = 0.0;
            for (std::size_t t = 0; t < r.index.size(); ++t) a += r.value[t] * x[r.index[t]];
            if (std::abs(a - r.rhs) > tol(r.rhs)) return false;
        }
        for (const auto& r : p.ub_rows) {
            double a = 0.0;
            for (std::size_t t = 0; t < r.index.size(); ++t) a += r.value[t] * x[r.index[t]];
            if (a - r.rhs > tol(r.rhs)) return false;
        }
        for (int j = 0; j < n; ++j) {
            double lo = std::isfinite(p.lower[j]) ? p.lower[j] : -M;
            double hi = std::isfinite(p.upper[j]) ? p.upper[j] : M;
            if (x[j] < lo - tol(lo) || x[j] > hi + tol(hi)) return false;
        }
        return true;
    }

    template <class F>
    void for_each_basis(int k, F&& f) const {
        const int N = static_cast<int>(cands.size());
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            f(idx);
            int i = k - 1;
            while (i >= 0 && idx[i] == N - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
        }
    }

    std::vector<Vertex> optimal_vertices(double box) {
        M = box;
        const int r = static_cast<int>(eq_sel.size());
        const int k = n - r;
        std::vector<Vertex> verts;
        if (k < 0) return verts;
        Eigen::MatrixXd Msys(n, n);
        Eigen::VectorXd rhs(n);
        if (r > 0) {
            Msys.topRows(r) = Ae;
            rhs.head(r) = be;
        }
        double best = INFINITY;
        auto visit = [&](const std::vector<int>& basis) {
            for (int t = 0; t < k; ++t) row_of(cands[basis[t]], Msys.row(r + t), rhs[r + t]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Msys);
            lu.setThreshold(1e-11);
            if (lu.rank() < n) return;
            Eigen::VectorXd x = lu.solve(rhs);
            if (!feasible(x)) return;
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += p.cost[j] * x[j];
            if (verts.empty() || obj < best - 1e-9 * (1.0 + std::abs(best))) {
                best = obj;
                verts.clear();
            }
            if (obj <= best + 1e-9 * (1.0 + std::abs(best))) verts.push_back({obj, x, basis});
        };
        if (k == 0) visit({});
        else for_each_basis(k, visit);
        return verts;
    }

    // Multipliers of a basis; nullopt unless every inequality multiplier is >= 0.
    std::optional<LpSolution> duals(const Vertex& v) const {
        const int r = static_cast<int>(eq_sel.size());
        const int k = static_cast<int>(v.basis.size());
        Eigen::MatrixXd Msys(n, n);  // columns: gradient of each active constraint
        for (int t = 0; t < r; ++t) Msys.col(t) = Ae.row(t).transpose();
        for (int t = 0; t < k; ++t) {
            const auto& c = cands[v.basis[t]];
            double rhs;
            Eigen::RowVectorXd tmp(n);
            row_of(c, tmp, rhs);
            double sign = (c.kind == Kind::lower || c.kind == Kind::art_lower) ? -1.0 : 1.0;
            Msys.col(r + t) = sign * tmp.transpose();
        }
        Eigen::VectorXd cvec(n);
        for (int j = 0; j < n; ++j) cvec[j] = -p.cost[j];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Msys);
        Eigen::VectorXd mult = lu.solve(cvec);
        if ((Msys * mult - cvec).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + cvec.cwiseAbs().maxCoeff())) return std::nullopt;
        LpSolution s;
        s.eq_duals.assign(p.n_eq(), 0.0);
        s.ub_duals.assign(p.n_ub(), 0.0);
        s.lower_duals.assign(n, 0.0);
        s.upper_duals.assign(n, 0.0);
        for (int t = 0; t < r; ++t) s.eq_duals[eq_sel[t]] = mult[t];
        for (int t = 0; t < k; ++t) {
            const double m = mult[r + t];
            const auto& c = cands[v.basis[t]];
            if (m < -1e-9) return std::nullopt;
            switch (c.kind) {
                case Kind::ub_row: s.ub_duals[c.index] = m; break;
                case Kind::lower: s.lower_duals[c.index] = m; break;
                case Kind::upper: s.upper_duals[c.index] = m; break;
                default:
                    if (m > 1e-9) return std::nullopt;  // artificial box must carry no price
            }
        }
        return s;
    }
};

}  // namespace

LpSolution vertex_oracle(const LpProblem& p, long max_combinations) {
    p.check();
    const int n = p.n_vars();
    LpSolution out;
    out.method = "vertex-enumeration";
    for (int j = 0; j < n; ++j)
        if (p.lower[j] > p.upper[j]) {
            out.status = LpStatus::Infeasible;
            return out;
        }
    Oracle o(p);
    const long combos = binomial(static_cast<long>(o.cands.size()), n - static_cast<long>(o.eq_sel.size()));
    if (combos > max_combinations) throw TooLarge("vertex enumeration needs " + std::to_string(combos) + " bases");

    auto v1 = o.optimal_vertices(1e6);
    if (v1.empty()) {
        out.status = LpStatus::Infeasible;
        return out;
    }
    auto v2 = o.optimal_vertices(2e6);
    if (!v2.empty() && v2.front().objective < v1.front().objective - 1e-7 * (1.0 + std::abs(v1.front().objective))) {
        out.status = LpStatus::Unbounded;
        Eigen::VectorXd d = v2.front().x - v1.front().x;
        out.certificate.ray.assign(d.data(), d.data() + n);
        return out;
    }
    o.M = 1e6;
    for (const auto& v : v1) {
        if (auto s = o.duals(v)) {
            s->status = LpStatus::Optimal;
            s->x.assign(v.x.data(), v.x.data() + n);
            s->objective = p.objective(s->x);
            s->method = out.method;
            return *s;
        }
    }
    // Every optimal basis failed the sign test; report the primal answer anyway.
    out.status = LpStatus::Optimal;
    out.x.assign(v1.front().x.data(), v1.front().x.data() + n);
    out.objective = p.objective(out.x);
    out.eq_duals.assign(p.n_eq(), 0.0);
    out.ub_duals.assign(p.n_ub(), 0.0);
    out.lower_duals.assign(n, 0.0);
    out.upper_duals.assign(n, 0.0);
    return out;
}

}  // namespace reserveflow
