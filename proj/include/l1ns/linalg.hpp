#pragma once

#include <vector>

#include "l1ns/matrix.hpp"

namespace l1ns {

/// Relative tolerance below which a column is treated as linearly dependent.
inline constexpr double kRankTolerance = 1e-10;

/// Orthonormalizes the columns of b by modified Gram-Schmidt in fixed column
/// order (one reorthogonalization pass keeps the Gram matrix at identity to
/// machine precision). The returned matrix spans the same column space.
/// Throws std::invalid_argument naming the first deficient column when the
/// numerical rank is below b.cols.
DenseMatrix orthonormalize(const DenseMatrix& b);

/// Same elimination as orthonormalize, but drops dependent columns instead of
/// throwing: returns an orthonormal basis of the column space with
/// rank <= min(rows, cols) columns. Used where the projected rank is capped
/// by the sketch dimension.
DenseMatrix span_basis(const DenseMatrix& b);

/// max_{ij} |B^T B - I|, the orthonormality defect.
double gram_identity_defect(const DenseMatrix& b);

/// l2 norm of x - Q Q^T x for orthonormal Q: distance from x to span(Q).
double projection_residual(const DenseMatrix& q, const std::vector<double>& x);

/// Solves A x = rhs for symmetric positive definite A (in place Cholesky on a
/// copy). Retries with escalating diagonal jitter when the factorization
/// breaks down; throws std::runtime_error if it still fails.
std::vector<double> cholesky_solve_spd(const DenseMatrix& a, const std::vector<double>& rhs);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in descending order with matching columns in
/// eigenvectors.
struct SymmetricEig {
  std::vector<double> values;
  DenseMatrix vectors;  // n x n, column k pairs with values[k]
};
SymmetricEig jacobi_eigh(const DenseMatrix& a);

/// Top-r left singular vectors and singular values of samples (rows x cols),
/// computed through the Gram matrix of the smaller side. Singular vectors
/// follow the sign convention that the largest-magnitude entry is positive
/// (ties broken by the lowest index).
struct ThinSvd {
  DenseMatrix left;  // rows x r, orthonormal
  std::vector<double> singular_values;
};
ThinSvd truncated_left_svd(const DenseMatrix& samples, std::size_t r);

}  // namespace l1ns
