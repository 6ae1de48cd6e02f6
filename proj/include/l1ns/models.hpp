#pragma once

#include <optional>
#include <vector>

#include "l1ns/matrix.hpp"

namespace l1ns {

/// Orthonormality defect allowed on a stored subspace basis.
inline constexpr double kBasisOrthoTolerance = 1e-10;

/// One candidate subspace: a rank-r orthonormal basis in ambient dimension D.
/// Construction validates the invariants (orthonormal columns, 1 <= r < D).
struct SubspaceModel {
  int id = 0;
  DenseMatrix basis;  // ambient_dim x rank, orthonormal columns
  std::size_t ambient_dim = 0;
  std::size_t rank = 0;

  SubspaceModel() = default;
  SubspaceModel(int id_, DenseMatrix basis_);
};

/// The searched-over family {S_0, ..., S_{n-1}}: shared ambient dimension and
/// rank, ids contiguous from 0, at least two models.
struct SubspaceCollection {
  std::vector<SubspaceModel> models;
  std::size_t ambient_dim = 0;
  std::size_t rank = 0;

  SubspaceCollection() = default;
  explicit SubspaceCollection(std::vector<SubspaceModel> models_);

  std::size_t size() const { return models.size(); }
};

struct QueryVector {
  std::vector<double> values;
  std::optional<int> label;  // ground truth when known

  QueryVector() = default;
  explicit QueryVector(std::vector<double> v, std::optional<int> label_ = std::nullopt);
};

/// Distance of one query to one subspace together with the minimizing
/// coefficients (coefficients are not unique at degenerate optima; the
/// distance is the contract).
struct DistanceRecord {
  int subspace_id = 0;
  double distance = 0.0;
  std::vector<double> minimizer_coeffs;
};

/// Fits a rank-r subspace to sample columns (ambient_dim x num_samples) as the
/// top-r left singular vectors. Throws when there are fewer than r samples or
/// the numerical rank is below r.
SubspaceModel fit_subspace(const DenseMatrix& samples, std::size_t r, int id = 0);

}  // namespace l1ns
