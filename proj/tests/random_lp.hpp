#pragma once

#include <random>

#include "reserveflow/lp.hpp"

namespace testutil {

// Small integer LPs. Most are boxed; `open_share` of them get one infinite bound,
// so unbounded and infeasible verdicts both show up.
inline reserveflow::LpProblem random_lp(std::mt19937_64& rng, double open_share = 0.0) {
    using reserveflow::kInf;
    std::uniform_int_distribution<int> nvar(1, 6), nub(0, 6), neq(0, 2), coef(-5, 5), lo(-5, 0), width(0, 10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    reserveflow::LpProblem p;
    const int n = nvar(rng);
    std::vector<double> x0(n);  // most rows are built to contain this point
    for (int j = 0; j < n; ++j) {
        double l = lo(rng), h = l + width(rng);
        p.add_variable("x" + std::to_string(j), coef(rng), l, h);
        x0[j] = std::uniform_int_distribution<int>(int(l), int(h))(rng);
    }
    auto rhs_at = [&](const std::vector<int>& idx, const std::vector<double>& val, int slack) {
        double v = 0.0;
        for (std::size_t t = 0; t < idx.size(); ++t) v += val[t] * x0[idx[t]];
        return u(rng) < 0.85 ? v + slack : double(coef(rng) * 2);
    };
    if (u(rng) < open_share) {
        int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
        if (u(rng) < 0.5) p.lower[j] = -kInf; else p.upper[j] = kInf;
    }
    auto row = [&](std::vector<int>& idx, std::vector<double>& val) {
        for (int j = 0; j < n; ++j) {
            int a = coef(rng);
            if (a != 0 && u(rng) < 0.7) {
                idx.push_back(j);
                val.push_back(a);
            }
        }
    };
    const int mu = nub(rng), me = std::min(neq(rng), n - 1);
    for (int i = 0; i < mu; ++i) {
        std::vector<int> idx;
        std::vector<double> val;
        row(idx, val);
        double b = rhs_at(idx, val, std::uniform_int_distribution<int>(0, 3)(rng));
        p.add_ub("u" + std::to_string(i), idx, val, b);
    }
    for (int i = 0; i < me; ++i) {
        std::vector<int> idx;
        std::vector<double> val;
        row(idx, val);
        double b = rhs_at(idx, val, 0);
        p.add_eq("e" + std::to_string(i), idx, val, b);
    }
    return p;
}

}  // namespace testutil
