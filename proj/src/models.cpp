#include "l1ns/models.hpp"

#include <string>

#include "l1ns/linalg.hpp"

namespace l1ns {

SubspaceModel::SubspaceModel(int id_, DenseMatrix basis_)
    : id(id_), basis(std::move(basis_)), ambient_dim(basis.rows), rank(basis.cols) {
  require_finite(basis, "SubspaceModel");
  if (rank < 1 || rank >= ambient_dim) {
    throw std::invalid_argument("SubspaceModel: need 1 <= rank < ambient_dim, got basis " +
                                basis.shape_string());
  }
  const double defect = gram_identity_defect(basis);
  if (defect > kBasisOrthoTolerance) {
    throw std::invalid_argument("SubspaceModel: basis columns not orthonormal (defect " +
                                std::to_string(defect) + ")");
  }
}

SubspaceCollection::SubspaceCollection(std::vector<SubspaceModel> models_)
    : models(std::move(models_)) {
  if (models.size() < 2) {
    throw std::invalid_argument("SubspaceCollection: need at least two subspaces");
  }
  ambient_dim = models.front().ambient_dim;
  rank = models.front().rank;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& m = models[i];
    if (m.ambient_dim != ambient_dim) {
      throw std::invalid_argument("SubspaceCollection: mixed ambient dimensions (" +
                                  std::to_string(m.ambient_dim) + " vs " +
                                  std::to_string(ambient_dim) + ")");
    }
    if (m.rank != rank) {
      throw std::invalid_argument("SubspaceCollection: mixed ranks");
    }
    if (m.id != static_cast<int>(i)) {
      throw std::invalid_argument("SubspaceCollection: ids must be contiguous from 0, found " +
                                  std::to_string(m.id) + " at position " + std::to_string(i));
    }
  }
}

QueryVector::QueryVector(std::vector<double> v, std::optional<int> label_)
    : values(std::move(v)), label(label_) {
  require_finite(values, "QueryVector");
}

SubspaceModel fit_subspace(const DenseMatrix& samples, std::size_t r, int id) {
  if (samples.cols < r) {
    throw std::invalid_argument("fit_subspace: " + std::to_string(samples.cols) +
                                " samples cannot determine rank " + std::to_string(r));
  }
  const ThinSvd svd = truncated_left_svd(samples, r);
  return SubspaceModel(id, svd.left);
}

}  // namespace l1ns
