#include "reserveflow/kernels.hpp"

#include <algorithm>
#include <omp.h>

namespace reserveflow::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace {

// Rows of column j's entries that touch columns >= j, marked into `mark`.
template <class Visit>
void for_column(int j, const ColMatrix& Gc, const RowMatrix& Gr, Visit&& visit) {
    const int* cp = Gc.outerIndexPtr();
    const int* ci = Gc.innerIndexPtr();
    const double* cv = Gc.valuePtr();
    const int* rp = Gr.outerIndexPtr();
    const int* ri = Gr.innerIndexPtr();
    const double* rv = Gr.valuePtr();
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
        const int i = ci[p];
        const double a = cv[p];
        // row entries are sorted by column; skip to the first one >= j
        const int* lo = std::lower_bound(ri + rp[i], ri + rp[i + 1], j);
        for (int q = static_cast<int>(lo - ri); q < rp[i + 1]; ++q) visit(i, a, ri[q], rv[q]);
    }
}

void pattern_column(int j, const ColMatrix& Gc, const RowMatrix& Gr, std::vector<char>& mark,
                    std::vector<int>& out) {
    out.clear();
    out.push_back(j);
    mark[j] = 1;
    for_column(j, Gc, Gr, [&](int, double, int k, double) {
        if (!mark[k]) {
            mark[k] = 1;
            out.push_back(k);
        }
    });
    for (int k : out) mark[k] = 0;
    std::sort(out.begin() + 1, out.end());
}

}  // namespace

NormalPattern normal_pattern(const ColMatrix& Gc, const RowMatrix& Gr, Execution ex) {
    const int n = static_cast<int>(Gc.cols());
    std::vector<std::vector<int>> cols(n);
    auto body = [&](std::vector<char>& mark, std::vector<int>& buf, int j) {
        pattern_column(j, Gc, Gr, mark, buf);
        cols[j] = buf;
    };
    if (ex == Execution::parallel) {
#pragma omp parallel
        {
            std::vector<char> mark(n, 0);
            std::vector<int> buf;
#pragma omp for schedule(dynamic, 16)
            for (int j = 0; j < n; ++j) body(mark, buf, j);
        }
    } else {
        std::vector<char> mark(n, 0);
        std::vector<int> buf;
        for (int j = 0; j < n; ++j) body(mark, buf, j);
    }
    NormalPattern pat;
    pat.n = n;
    pat.col_ptr.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) pat.col_ptr[j + 1] = pat.col_ptr[j] + static_cast<int>(cols[j].size());
    pat.row_idx.reserve(pat.col_ptr[n]);
    for (auto& c : cols) pat.row_idx.insert(pat.row_idx.end(), c.begin(), c.end());
    return pat;
}

namespace {

void assemble_column(int j, const NormalPattern& pat, const ColMatrix& Gc, const RowMatrix& Gr,
                     std::span<const double> w, std::span<const double> d, std::span<double> values,
                     std::vector<double>& acc) {
    for_column(j, Gc, Gr, [&](int i, double a, int k, double b) { acc[k] += w[i] * a * b; });
    const int p0 = pat.col_ptr[j], p1 = pat.col_ptr[j + 1];
    for (int p = p0; p < p1; ++p) {
        const int k = pat.row_idx[p];
        values[p] = acc[k];
        acc[k] = 0.0;
    }
    values[p0] += d[j];
}

}  // namespace

void assemble_normal(const NormalPattern& pat, const ColMatrix& Gc, const RowMatrix& Gr,
                     std::span<const double> w, std::span<const double> d, std::span<double> values,
                     Execution ex) {
    const int n = pat.n;
    if (ex == Execution::parallel) {
#pragma omp parallel
        {
            std::vector<double> acc(n, 0.0);
#pragma omp for schedule(dynamic, 8)
            for (int j = 0; j < n; ++j) assemble_column(j, pat, Gc, Gr, w, d, values, acc);
        }
    } else {
        std::vector<double> acc(n, 0.0);
        for (int j = 0; j < n; ++j) assemble_column(j, pat, Gc, Gr, w, d, values, acc);
    }
}

void spmv(const RowMatrix& G, std::span<const double> x, std::span<double> y, Execution ex) {
    const int m = static_cast<int>(G.rows());
    const int* rp = G.outerIndexPtr();
    const int* ri = G.innerIndexPtr();
    const double* rv = G.valuePtr();
    auto row = [&](int i) {
        double s = 0.0;
        for (int q = rp[i]; q < rp[i + 1]; ++q) s += rv[q] * x[ri[q]];
        y[i] = s;
    };
    if (ex == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < m; ++i) row(i);
    } else {
        for (int i = 0; i < m; ++i) row(i);
    }
}

void spmv_transpose(const ColMatrix& Gc, std::span<const double> x, std::span<double> y, Execution ex) {
    const int n = static_cast<int>(Gc.cols());
    const int* cp = Gc.outerIndexPtr();
    const int* ci = Gc.innerIndexPtr();
    const double* cv = Gc.valuePtr();
    auto col = [&](int j) {
        double s = 0.0;
        for (int p = cp[j]; p < cp[j + 1]; ++p) s += cv[p] * x[ci[p]];
        y[j] = s;
    };
    if (ex == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < n; ++j) col(j);
    } else {
        for (int j = 0; j < n; ++j) col(j);
    }
}

}  // namespace reserveflow::kernels
