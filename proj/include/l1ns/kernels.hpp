#pragma once

#include <vector>

#include "l1ns/matrix.hpp"

namespace l1ns {

// OpenMP-parallel dense kernels. Each output element is produced by exactly
// one thread with a fixed serial accumulation order, so results are
// bit-identical for any thread count. Serial counterparts used as the test
// oracle live in reference.hpp.

/// y = M x. Throws std::invalid_argument on shape mismatch (message carries
/// both shapes).
std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& x);

/// y = M^T x.
std::vector<double> matvec_transpose(const DenseMatrix& m, const std::vector<double>& x);

/// C = A B.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// H = A^T diag(w) A, returned as a dense cols x cols matrix.
/// w.size() must equal a.rows.
DenseMatrix gram_weighted(const DenseMatrix& a, const std::vector<double>& w);

DenseMatrix transpose(const DenseMatrix& m);

}  // namespace l1ns
