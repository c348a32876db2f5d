#pragma once

#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "reserveflow/execution.hpp"

namespace reserveflow::kernels {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// Lower triangle (diagonal first in each column) of G'G's sparsity, plus the full diagonal.
struct NormalPattern {
    int n = 0;
    std::vector<int> col_ptr;  // n + 1
    std::vector<int> row_idx;
};

NormalPattern normal_pattern(const ColMatrix& Gc, const RowMatrix& Gr, Execution ex = Execution::parallel);

// values[p] = (G' diag(w) G + diag(d))(row_idx[p], col) for every pattern slot.
// Each column is summed in a fixed order, so serial and parallel agree exactly.
void assemble_normal(const NormalPattern& pat, const ColMatrix& Gc, const RowMatrix& Gr,
                     std::span<const double> w, std::span<const double> d, std::span<double> values,
                     Execution ex = Execution::parallel);

// y = G x
void spmv(const RowMatrix& G, std::span<const double> x, std::span<double> y, Execution ex = Execution::parallel);

// y = G' x, computed column-wise from the column-major copy.
void spmv_transpose(const ColMatrix& Gc, std::span<const double> x, std::span<double> y,
                    Execution ex = Execution::parallel);

int max_threads();

}  // namespace reserveflow::kernels
