// Mehrotra predictor-corrector on
//   min c'x  s.t.  A x = b,  G x + s = h,  x - wl = lo,  x + wu = hi,  s, wl, wu >= 0.
// Newton systems reduce to the quasidefinite form [H + dp I, A'; A, -dd I] with
// H = G' diag(z/s) G + diag(zl/wl + zu/wu), factored by sparse LDL'.
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "lp_internal.hpp"

namespace reserveflow::detail {

namespace {

using Vec = Eigen::VectorXd;
using KktMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct Scaling {
    Vec rA, rG, cs;
    double sc = 1.0, sb = 1.0;
};

// Ruiz equilibration of [A; G] in place.
Scaling equilibrate(kernels::RowMatrix& A, kernels::RowMatrix& G, int n) {
    Scaling sc;
    sc.rA = Vec::Ones(A.rows());
    sc.rG = Vec::Ones(G.rows());
    sc.cs = Vec::Ones(n);
    for (int pass = 0; pass < 15; ++pass) {
        Vec cmax = Vec::Zero(n);
        double worst = 0.0;
        auto rows = [&](kernels::RowMatrix& M) {
            Vec rs(M.rows());
            for (int i = 0; i < M.rows(); ++i) {
                double m = 0.0;
                for (kernels::RowMatrix::InnerIterator it(M, i); it; ++it) {
                    m = std::max(m, std::abs(it.value()));
                    cmax[it.col()] = std::max(cmax[it.col()], std::abs(it.value()));
                }
                rs[i] = m > 0 ? 1.0 / std::sqrt(m) : 1.0;
                if (m > 0) worst = std::max(worst, std::abs(1.0 - m));
            }
            return rs;
        };
        Vec ra = rows(A), rg = rows(G);
        Vec cc(n);
        for (int j = 0; j < n; ++j) {
            cc[j] = cmax[j] > 0 ? 1.0 / std::sqrt(cmax[j]) : 1.0;
            if (cmax[j] > 0) worst = std::max(worst, std::abs(1.0 - cmax[j]));
        }
        if (worst < 1e-2) break;
        auto apply = [&](kernels::RowMatrix& M, const Vec& r) {
            for (int i = 0; i < M.rows(); ++i)
                for (kernels::RowMatrix::InnerIterator it(M, i); it; ++it) it.valueRef() *= r[i] * cc[it.col()];
        };
        apply(A, ra);
        apply(G, rg);
        sc.rA.array() *= ra.array();
        sc.rG.array() *= rg.array();
        sc.cs.array() *= cc.array();
    }
    return sc;
}

double max_step(const Vec& v, const Vec& dv, const Vec* mask = nullptr) {
    double a = 1.0;
    for (int i = 0; i < v.size(); ++i) {
        if (mask && (*mask)[i] == 0.0) continue;
        if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
    }
    return a;
}

}  // namespace

IpmResult interior_point(const SparseLp& lp0, const IpmOptions& opt) {
    const int n = lp0.n;
    kernels::RowMatrix A = lp0.A, G = lp0.G;
    const int me = static_cast<int>(A.rows()), mi = static_cast<int>(G.rows());
    Scaling S = equilibrate(A, G, n);

    Vec b = S.rA.cwiseProduct(lp0.b), h = S.rG.cwiseProduct(lp0.h), c = S.cs.cwiseProduct(lp0.c);
    Vec lo(n), hi(n), hasL = Vec::Zero(n), hasU = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
        lo[j] = lp0.lo[j] / S.cs[j];
        hi[j] = lp0.hi[j] / S.cs[j];
        if (std::isfinite(lo[j])) hasL[j] = 1.0; else lo[j] = 0.0;
        if (std::isfinite(hi[j])) hasU[j] = 1.0; else hi[j] = 0.0;
    }
    S.sc = std::max(1.0, inf_norm(c));
    S.sb = std::max({1.0, inf_norm(b), inf_norm(h), inf_norm(lo), inf_norm(hi)});
    c /= S.sc;
    b /= S.sb;
    h /= S.sb;
    lo /= S.sb;
    hi /= S.sb;
    // Weights turning scaled residuals into the relative, unscaled measures used by check_kkt.
    Vec wp(me), wi(mi), wlb(n), wub(n), wd(n);
    for (int i = 0; i < me; ++i) wp[i] = S.sb / (S.rA[i] * (1.0 + std::abs(lp0.b[i])));
    for (int i = 0; i < mi; ++i) wi[i] = S.sb / (S.rG[i] * (1.0 + std::abs(lp0.h[i])));
    const double cmax = inf_norm(lp0.c);
    for (int j = 0; j < n; ++j) {
        wlb[j] = hasL[j] != 0.0 ? S.cs[j] * S.sb / (1.0 + std::abs(lp0.lo[j])) : 0.0;
        wub[j] = hasU[j] != 0.0 ? S.cs[j] * S.sb / (1.0 + std::abs(lp0.hi[j])) : 0.0;
        wd[j] = S.sc / (S.cs[j] * (1.0 + cmax));
    }
    const double objscale = S.sc * S.sb;

    kernels::ColMatrix Gc = G, Ac = A;
    Gc.makeCompressed();
    Ac.makeCompressed();

    // KKT pattern: H lower triangle, then A below it, then the dual diagonal.
    auto pat = kernels::normal_pattern(Gc, G, opt.execution);
    const int N = n + me;
    KktMatrix K(N, N);
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(pat.row_idx.size() + Ac.nonZeros() + me);
        for (int j = 0; j < n; ++j)
            for (int p = pat.col_ptr[j]; p < pat.col_ptr[j + 1]; ++p) t.emplace_back(pat.row_idx[p], j, 1.0);
        for (int j = 0; j < n; ++j)
            for (kernels::ColMatrix::InnerIterator it(Ac, j); it; ++it) t.emplace_back(n + it.row(), j, 1.0);
        for (int i = 0; i < me; ++i) t.emplace_back(n + i, n + i, 1.0);
        K.setFromTriplets(t.begin(), t.end());
        K.makeCompressed();
    }
    std::vector<int> hpos(pat.row_idx.size());
    for (int j = 0; j < n; ++j) {
        const int base = K.outerIndexPtr()[j];
        const int hlen = pat.col_ptr[j + 1] - pat.col_ptr[j];
        for (int p = pat.col_ptr[j]; p < pat.col_ptr[j + 1]; ++p) hpos[p] = base + (p - pat.col_ptr[j]);
        int q = base + hlen;
        for (kernels::ColMatrix::InnerIterator it(Ac, j); it; ++it) K.valuePtr()[q++] = it.value();
    }
    std::vector<double> hvals(pat.row_idx.size());
    Eigen::SimplicialLDLT<KktMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    ldlt.analyzePattern(K);

    // Starting point.
    Vec x(n), y = Vec::Zero(me), s(mi), z = Vec::Ones(mi);
    Vec wl = Vec::Ones(n), zl = hasL, wu = Vec::Ones(n), zu = hasU;
    for (int j = 0; j < n; ++j) {
        if (hasL[j] != 0.0 && hasU[j] != 0.0) x[j] = 0.5 * (lo[j] + hi[j]);
        else if (hasL[j] != 0.0) x[j] = lo[j] + 1.0;
        else if (hasU[j] != 0.0) x[j] = hi[j] - 1.0;
        else x[j] = 0.0;
        if (hasL[j] != 0.0) wl[j] = std::max(x[j] - lo[j], 1.0);
        if (hasU[j] != 0.0) wu[j] = std::max(hi[j] - x[j], 1.0);
    }
    {
        Vec gx = G * x;
        for (int i = 0; i < mi; ++i) s[i] = std::max(h[i] - gx[i], 1.0);
    }
    const double ncomp = std::max(1.0, double(mi) + hasL.sum() + hasU.sum());

    IpmResult best;
    double best_merit = INFINITY;
    int since_best = 0;
    double delta_p = 1e-8, delta_d = 1e-8;

    Vec W(mi), D(n), dx, dy, ds, dz, dwl, dzl, dwu, dzu;
    IpmResult::Outcome outcome = IpmResult::Outcome::iteration_limit;
    int iter = 0;

    auto snapshot = [&](IpmResult& r, double pres, double dres, double gap) {
        r.x = x;
        r.y = y;
        r.z = z;
        r.zl = zl;
        r.zu = zu;
        r.primal_res = pres;
        r.dual_res = dres;
        r.gap = gap;
        r.iterations = iter;
    };

    for (;; ++iter) {
        Vec rd = c + Ac.transpose() * y + Gc.transpose() * z - zl.cwiseProduct(hasL) + zu.cwiseProduct(hasU);
        Vec rp = A * x - b;
        Vec ri = G * x + s - h;
        Vec rl = (x - wl - lo).cwiseProduct(hasL);
        Vec ru = (x + wu - hi).cwiseProduct(hasU);
        const double mu = (s.dot(z) + wl.cwiseProduct(zl).dot(hasL) + wu.cwiseProduct(zu).dot(hasU)) / ncomp;
        const double pobj = c.dot(x);
        const double dobj = -b.dot(y) - h.dot(z) + lo.cwiseProduct(hasL).dot(zl) - hi.cwiseProduct(hasU).dot(zu);
        const double pres = std::max({inf_norm(rp.cwiseProduct(wp)), inf_norm(ri.cwiseProduct(wi)),
                                      inf_norm(rl.cwiseProduct(wlb)), inf_norm(ru.cwiseProduct(wub))});
        const double dres = inf_norm(rd.cwiseProduct(wd));
        const double gap = std::abs(pobj - dobj) * objscale / (1.0 + std::abs(pobj) * objscale);
        const double merit = std::max({pres, dres, gap});

        if (merit < best_merit * 0.9 || (merit < best_merit && merit < opt.accept)) {
            best_merit = merit;
            snapshot(best, pres, dres, gap);
            since_best = 0;
        } else {
            ++since_best;
        }
        if (pres <= opt.tolerance && dres <= opt.tolerance && gap <= opt.tolerance) {
            snapshot(best, pres, dres, gap);
            outcome = IpmResult::Outcome::converged;
            break;
        }
        if (std::max(inf_norm(x), inf_norm(s)) > 1e12 ||
            std::max({inf_norm(y), inf_norm(z), inf_norm(zl), inf_norm(zu)}) > 1e12 || !std::isfinite(merit)) {
            outcome = IpmResult::Outcome::diverged;
            break;
        }
        if (iter >= opt.max_iterations) break;
        // Near the end a poorly conditioned step can throw away an acceptable iterate.
        if (since_best >= 12 || (best_merit <= opt.accept && merit > 10.0 * best_merit)) {
            outcome = IpmResult::Outcome::stalled;
            break;
        }

        for (int i = 0; i < mi; ++i) W[i] = z[i] / s[i];
        for (int j = 0; j < n; ++j)
            D[j] = (hasL[j] != 0.0 ? zl[j] / wl[j] : 0.0) + (hasU[j] != 0.0 ? zu[j] / wu[j] : 0.0);

        bool factored = false;
        for (int attempt = 0; attempt < 6 && !factored; ++attempt) {
            Vec dreg = D.array() + delta_p;
            kernels::assemble_normal(pat, Gc, G, {W.data(), size_t(mi)}, {dreg.data(), size_t(n)}, hvals,
                                     opt.execution);
            for (std::size_t p = 0; p < hvals.size(); ++p) K.valuePtr()[hpos[p]] = hvals[p];
            for (int i = 0; i < me; ++i) K.valuePtr()[K.outerIndexPtr()[n + i]] = -delta_d;
            ldlt.factorize(K);
            factored = ldlt.info() == Eigen::Success;
            if (!factored) {
                delta_p *= 100;
                delta_d *= 100;
            }
        }
        if (!factored) {
            outcome = IpmResult::Outcome::stalled;
            break;
        }

        // Unregularized operator for iterative refinement.
        auto kkt_apply = [&](const Vec& vx, const Vec& vy, Vec& ox, Vec& oy) {
            Vec gx = G * vx;
            ox = Gc.transpose() * W.cwiseProduct(gx) + D.cwiseProduct(vx) + Ac.transpose() * vy;
            oy = A * vx;
        };
        auto kkt_solve = [&](const Vec& r1, const Vec& r2, Vec& ox, Vec& oy) {
            Vec rhs(N);
            rhs << r1, r2;
            Vec sol = ldlt.solve(rhs);
            Vec ax, ay;
            kkt_apply(sol.head(n), sol.tail(me), ax, ay);
            double res = std::max(inf_norm(r1 - ax), inf_norm(r2 - ay));
            for (int it = 0; it < 4 && res > 1e-14 * (1.0 + inf_norm(rhs)); ++it) {
                Vec e(N);
                e << r1 - ax, r2 - ay;
                Vec trial = sol + ldlt.solve(e);
                kkt_apply(trial.head(n), trial.tail(me), ax, ay);
                double r_new = std::max(inf_norm(r1 - ax), inf_norm(r2 - ay));
                if (!(r_new < res)) break;
                sol = trial;
                res = r_new;
            }
            ox = sol.head(n);
            oy = sol.tail(me);
        };
        auto newton = [&](const Vec& cs, const Vec& cl, const Vec& cu) {
            Vec t1 = (cs + z.cwiseProduct(ri)).cwiseQuotient(s);
            Vec r1 = -rd - Gc.transpose() * t1;
            for (int j = 0; j < n; ++j) {
                if (hasL[j] != 0.0) r1[j] += (cl[j] - zl[j] * rl[j]) / wl[j];
                if (hasU[j] != 0.0) r1[j] -= (cu[j] + zu[j] * ru[j]) / wu[j];
            }
            Vec r2 = -rp;
            kkt_solve(r1, r2, dx, dy);
            ds = -ri - G * dx;
            dz = (cs - z.cwiseProduct(ds)).cwiseQuotient(s);
            dwl = (dx + rl).cwiseProduct(hasL);
            dwu = (-ru - dx).cwiseProduct(hasU);
            dzl.resize(n);
            dzu.resize(n);
            for (int j = 0; j < n; ++j) {
                dzl[j] = hasL[j] != 0.0 ? (cl[j] - zl[j] * dwl[j]) / wl[j] : 0.0;
                dzu[j] = hasU[j] != 0.0 ? (cu[j] - zu[j] * dwu[j]) / wu[j] : 0.0;
            }
        };
        auto steps = [&](double& ap, double& ad) {
            ap = std::min({max_step(s, ds), max_step(wl, dwl, &hasL), max_step(wu, dwu, &hasU)});
            ad = std::min({max_step(z, dz), max_step(zl, dzl, &hasL), max_step(zu, dzu, &hasU)});
        };

        // Predictor.
        Vec cs = -s.cwiseProduct(z);
        Vec cl = -wl.cwiseProduct(zl).cwiseProduct(hasL);
        Vec cu = -wu.cwiseProduct(zu).cwiseProduct(hasU);
        newton(cs, cl, cu);
        double ap, ad;
        steps(ap, ad);
        const double mu_aff = ((s + ap * ds).dot(z + ad * dz) +
                               (wl + ap * dwl).cwiseProduct(zl + ad * dzl).dot(hasL) +
                               (wu + ap * dwu).cwiseProduct(zu + ad * dzu).dot(hasU)) / ncomp;
        const double sigma = mu > 0 ? std::clamp(std::pow(mu_aff / mu, 3), 0.0, 1.0) : 0.0;

        // Corrector.
        cs = cs.array() + sigma * mu - (ds.cwiseProduct(dz)).array();
        cl = (cl.array() + sigma * mu - (dwl.cwiseProduct(dzl)).array()).matrix().cwiseProduct(hasL);
        cu = (cu.array() + sigma * mu - (dwu.cwiseProduct(dzu)).array()).matrix().cwiseProduct(hasU);
        newton(cs, cl, cu);
        steps(ap, ad);
        const double eta = 0.995;
        ap = std::min(1.0, eta * ap);
        ad = std::min(1.0, eta * ad);

        x += ap * dx;
        s += ap * ds;
        wl += ap * dwl;
        wu += ap * dwu;
        y += ad * dy;
        z += ad * dz;
        zl += ad * dzl;
        zu += ad * dzu;
    }

    IpmResult out = std::move(best);
    out.outcome = outcome;
    out.iterations = iter;
    if (out.x.size() != n) return out;  // no usable iterate

    // Undo scaling.
    out.x = out.x.cwiseProduct(S.cs) * S.sb;
    out.y = out.y.cwiseProduct(S.rA) * S.sc;
    out.z = out.z.cwiseProduct(S.rG) * S.sc;
    out.zl = out.zl.cwiseProduct(hasL).cwiseQuotient(S.cs) * S.sc;
    out.zu = out.zu.cwiseProduct(hasU).cwiseQuotient(S.cs) * S.sc;
    return out;
}

}  // namespace reserveflow::detail
