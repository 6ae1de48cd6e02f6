#include "l1ns/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "l1ns/kernels.hpp"

namespace l1ns {

namespace {

// Shared MGS elimination. Returns the kept column indices; writes the
// orthonormal columns into q (rows x kept). When truncate is false a
// dependent column throws instead of being dropped.
DenseMatrix mgs_impl(const DenseMatrix& b, bool truncate) {
  require_finite(b, "orthonormalize");
  const std::size_t m = b.rows;
  const std::size_t n = b.cols;
  if (n == 0 || m == 0) throw std::invalid_argument("orthonormalize: empty matrix");

  std::vector<std::vector<double>> q;
  q.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> v = b.column(j);
    const double original_norm = norm2(v);
    if (original_norm == 0.0) {
      if (truncate) continue;
      throw std::invalid_argument("orthonormalize: column " + std::to_string(j) +
                                  " is numerically rank-deficient");
    }
    // Two elimination passes; the second repairs the loss of orthogonality
    // MGS suffers on ill-conditioned input.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& qi : q) {
        const double c = dot(qi, v);
        for (std::size_t i = 0; i < m; ++i) v[i] -= c * qi[i];
      }
    }
    const double residual_norm = norm2(v);
    if (residual_norm <= kRankTolerance * original_norm) {
      if (truncate) continue;
      throw std::invalid_argument("orthonormalize: column " + std::to_string(j) +
                                  " is numerically rank-deficient");
    }
    for (std::size_t i = 0; i < m; ++i) v[i] /= residual_norm;
    q.push_back(std::move(v));
  }
  if (q.empty()) throw std::invalid_argument("orthonormalize: all columns rank-deficient");

  DenseMatrix out(m, q.size());
  for (std::size_t j = 0; j < q.size(); ++j) out.set_column(j, q[j]);
  return out;
}

}  // namespace

DenseMatrix orthonormalize(const DenseMatrix& b) { return mgs_impl(b, /*truncate=*/false); }

DenseMatrix span_basis(const DenseMatrix& b) { return mgs_impl(b, /*truncate=*/true); }

double gram_identity_defect(const DenseMatrix& b) {
  double defect = 0.0;
  for (std::size_t p = 0; p < b.cols; ++p) {
    for (std::size_t r = p; r < b.cols; ++r) {
      double g = 0.0;
      for (std::size_t i = 0; i < b.rows; ++i) g += b.at(i, p) * b.at(i, r);
      const double target = (p == r) ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(g - target));
    }
  }
  return defect;
}

double projection_residual(const DenseMatrix& q, const std::vector<double>& x) {
  const std::vector<double> coeffs = matvec_transpose(q, x);
  std::vector<double> res = x;
  for (std::size_t j = 0; j < q.cols; ++j) {
    const double c = coeffs[j];
    for (std::size_t i = 0; i < q.rows; ++i) res[i] -= c * q.at(i, j);
  }
  return norm2(res);
}

std::vector<double> cholesky_solve_spd(const DenseMatrix& a, const std::vector<double>& rhs) {
  if (a.rows != a.cols || rhs.size() != a.rows) {
    throw std::invalid_argument("cholesky_solve_spd: shape mismatch " + a.shape_string());
  }
  const std::size_t n = a.rows;
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a.at(i, i)));

  double jitter = 0.0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    DenseMatrix l = a;
    if (jitter > 0.0) {
      for (std::size_t i = 0; i < n; ++i) l.at(i, i) += jitter;
    }
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      double d = l.at(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l.at(j, k) * l.at(j, k);
      if (!(d > 0.0) || !std::isfinite(d)) {
        ok = false;
        break;
      }
      const double ljj = std::sqrt(d);
      l.at(j, j) = ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = l.at(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
        l.at(i, j) = s / ljj;
      }
    }
    if (!ok) {
      jitter = (jitter == 0.0) ? 1e-14 * std::max(max_diag, 1.0) : jitter * 100.0;
      continue;
    }
    // Forward then back substitution with L.
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs[i];
      for (std::size_t k = 0; k < i; ++k) s -= l.at(i, k) * y[k];
      y[i] = s / l.at(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= l.at(k, ii) * x[k];
      x[ii] = s / l.at(ii, ii);
    }
    return x;
  }
  throw std::runtime_error("cholesky_solve_spd: matrix not positive definite");
}

SymmetricEig jacobi_eigh(const DenseMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("jacobi_eigh: matrix must be square");
  const std::size_t n = a.rows;
  DenseMatrix m = a;
  DenseMatrix v = identity_matrix(n);

  double norm = 0.0;
  for (double x : m.data) norm = std::max(norm, std::abs(x));
  if (norm == 0.0) norm = 1.0;

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(m.at(p, q)));
    if (off <= 1e-15 * norm) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m.at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = m.at(p, p);
        const double aqq = m.at(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m.at(k, p);
          const double mkq = m.at(k, q);
          m.at(k, p) = c * mkp - s * mkq;
          m.at(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m.at(p, k);
          const double mqk = m.at(q, k);
          m.at(p, k) = c * mpk - s * mqk;
          m.at(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v.at(k, p);
          const double vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = m.at(i, i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return diag[i] > diag[j]; });

  SymmetricEig out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = diag[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors.at(i, k) = v.at(i, order[k]);
  }
  return out;
}

namespace {

void apply_sign_convention(DenseMatrix& u) {
  for (std::size_t j = 0; j < u.cols; ++j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < u.rows; ++i) {
      const double mag = std::abs(u.at(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (u.at(arg, j) < 0.0) {
      for (std::size_t i = 0; i < u.rows; ++i) u.at(i, j) = -u.at(i, j);
    }
  }
}

}  // namespace

ThinSvd truncated_left_svd(const DenseMatrix& samples, std::size_t r) {
  require_finite(samples, "truncated_left_svd");
  const std::size_t d = samples.rows;
  const std::size_t m = samples.cols;
  if (r == 0 || r > std::min(d, m)) {
    throw std::invalid_argument("truncated_left_svd: rank " + std::to_string(r) +
                                " out of range for " + samples.shape_string());
  }

  ThinSvd out;
  if (m <= d) {
    // Small Gram S^T S: eigenvectors give right singular vectors, then map
    // through S and re-orthonormalize to recover full precision.
    DenseMatrix gram(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += samples.at(k, i) * samples.at(k, j);
        gram.at(i, j) = s;
        gram.at(j, i) = s;
      }
    }
    const SymmetricEig eig = jacobi_eigh(gram);
    const double sigma1 = std::sqrt(std::max(eig.values[0], 0.0));
    out.singular_values.resize(r);
    DenseMatrix u(d, r);
    for (std::size_t k = 0; k < r; ++k) {
      const double sigma = std::sqrt(std::max(eig.values[k], 0.0));
      out.singular_values[k] = sigma;
      if (sigma <= kRankTolerance * std::max(sigma1, 1e-300)) {
        throw std::invalid_argument("truncated_left_svd: numerical rank below " +
                                    std::to_string(r) + " (singular value " +
                                    std::to_string(k) + " collapses)");
      }
      for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += samples.at(i, j) * eig.vectors.at(j, k);
        u.at(i, k) = s / sigma;
      }
    }
    out.left = orthonormalize(u);
  } else {
    // More samples than ambient dimensions: use S S^T, whose eigenvectors are
    // the left singular vectors directly.
    DenseMatrix gram(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += samples.at(i, k) * samples.at(j, k);
        gram.at(i, j) = s;
        gram.at(j, i) = s;
      }
    }
    const SymmetricEig eig = jacobi_eigh(gram);
    const double sigma1 = std::sqrt(std::max(eig.values[0], 0.0));
    out.singular_values.resize(r);
    DenseMatrix u(d, r);
    for (std::size_t k = 0; k < r; ++k) {
      const double sigma = std::sqrt(std::max(eig.values[k], 0.0));
      out.singular_values[k] = sigma;
      if (sigma <= kRankTolerance * std::max(sigma1, 1e-300)) {
        throw std::invalid_argument("truncated_left_svd: numerical rank below " +
                                    std::to_string(r) + " (singular value " +
                                    std::to_string(k) + " collapses)");
      }
      for (std::size_t i = 0; i < d; ++i) u.at(i, k) = eig.vectors.at(i, k);
    }
    out.left = orthonormalize(u);
  }
  apply_sign_convention(out.left);
  return out;
}

}  // namespace l1ns
