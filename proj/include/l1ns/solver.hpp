#pragma once

#include <cstddef>
#include <vector>

#include "l1ns/matrix.hpp"
#include "l1ns/models.hpp"

namespace l1ns {

enum class SolveStatus { Converged, MaxIters };

struct SolverOptions {
  /// Relative surrogate duality gap at which the interior-point loop stops.
  double tolerance = 1e-9;
  std::size_t max_iterations = 200;
  /// Scale of the deterministic lexicographic perturbation of q that breaks
  /// ties among optimal vertices. The reported objective is always recomputed
  /// against the unperturbed q.
  double degeneracy_perturbation = 1e-12;
};

struct L1Solution {
  std::vector<double> coeffs;
  double objective = 0.0;  // ||q - B coeffs||_1 against the original q
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::Converged;
};

/// Least absolute deviations: min_v ||q - B v||_1 for B (m x r, full column
/// rank, m > r >= 1), solved as the epigraph LP
///     minimize sum(t)  subject to  -t <= q - B v <= t
/// by a primal-dual interior-point method with certified surrogate duality
/// gaps. Large m gets an iteratively-reweighted least squares warm start.
/// Hitting the iteration cap returns the best iterate with status MaxIters;
/// rank-deficient or non-finite input throws std::invalid_argument.
L1Solution solve_l1(const std::vector<double>& q, const DenseMatrix& b,
                    const SolverOptions& opts = {});

struct OracleResult {
  double value = 0.0;
  bool approximate = false;  // set when the grid fallback was used
};

/// Independent brute-force ground truth for solve_l1, restricted to m <= 14,
/// r <= 3. Some optimal vertex zeroes r residuals in general position, so the
/// minimum over all r-subset interpolations (plus v = 0) is the LP optimum.
/// When every subset block is singular the result falls back to iterative
/// grid refinement and is flagged approximate.
OracleResult oracle_l1(const std::vector<double>& q, const DenseMatrix& b);

/// solve_l1 against the subspace basis, packaged as a DistanceRecord.
DistanceRecord distance_to_subspace(const QueryVector& q, const SubspaceModel& s,
                                    const SolverOptions& opts = {});

}  // namespace l1ns
