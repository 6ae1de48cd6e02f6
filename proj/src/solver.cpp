#include "l1ns/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "l1ns/kernels.hpp"
#include "l1ns/linalg.hpp"

namespace l1ns {

namespace {

constexpr double kLineSearchAlpha = 0.01;
constexpr double kLineSearchBeta = 0.5;
constexpr double kBarrierMu = 10.0;
constexpr std::size_t kIrlsThreshold = 512;

double l1_residual(const std::vector<double>& q, const DenseMatrix& b,
                   const std::vector<double>& v) {
  const std::vector<double> bv = matvec(b, v);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += std::abs(q[i] - bv[i]);
  return s;
}

// Weighted least squares step shared by the plain warm start (unit weights)
// and IRLS refinement: solves (B^T diag(w) B) v = B^T diag(w) q.
std::vector<double> weighted_ls(const std::vector<double>& q, const DenseMatrix& b,
                                const std::vector<double>& w) {
  const DenseMatrix h = gram_weighted(b, w);
  std::vector<double> wq(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) wq[i] = w[i] * q[i];
  return cholesky_solve_spd(h, matvec_transpose(b, wq));
}

std::vector<double> irls_warm_start(const std::vector<double>& q, const DenseMatrix& b,
                                    std::size_t max_rounds) {
  const std::size_t m = q.size();
  std::vector<double> w(m, 1.0);
  std::vector<double> v = weighted_ls(q, b, w);
  double best_obj = l1_residual(q, b, v);
  std::vector<double> best_v = v;
  const double damp = 1e-8 * (norm_inf(q) + 1.0);
  for (std::size_t round = 0; round < max_rounds; ++round) {
    const std::vector<double> bv = matvec(b, v);
    for (std::size_t i = 0; i < m; ++i) w[i] = 1.0 / std::max(std::abs(q[i] - bv[i]), damp);
    v = weighted_ls(q, b, w);
    const double obj = l1_residual(q, b, v);
    if (obj < best_obj) {
      best_v = v;
      const bool small_gain = obj > (1.0 - 1e-3) * best_obj;
      best_obj = obj;
      if (small_gain) break;
    } else {
      break;
    }
  }
  return best_v;
}

}  // namespace

L1Solution solve_l1(const std::vector<double>& q, const DenseMatrix& b,
                    const SolverOptions& opts) {
  const std::size_t m = q.size();
  const std::size_t r = b.cols;
  if (b.rows != m) {
    throw std::invalid_argument("solve_l1: q length " + std::to_string(m) +
                                " vs basis " + b.shape_string());
  }
  if (r < 1 || m <= r) {
    throw std::invalid_argument("solve_l1: need m > r >= 1, got " + b.shape_string());
  }
  if (opts.tolerance <= 0.0 || opts.max_iterations < 1) {
    throw std::invalid_argument("solve_l1: invalid solver options");
  }
  require_finite(q, "solve_l1 query");
  require_finite(b, "solve_l1 basis");
  // Rank gate: the Newton systems need full column rank.
  try {
    (void)orthonormalize(b);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("solve_l1: rank-deficient basis: ") + e.what());
  }

  const double q_norm1 = norm1(q);
  L1Solution sol;
  sol.coeffs.assign(r, 0.0);
  if (q_norm1 == 0.0) return sol;

  // Deterministic lexicographic tie-break perturbation; the objective is
  // reported against the original q.
  std::vector<double> qp = q;
  if (opts.degeneracy_perturbation > 0.0) {
    const double scale = opts.degeneracy_perturbation * norm_inf(q);
    for (std::size_t i = 0; i < m; ++i) {
      qp[i] += scale * (static_cast<double>(i + 1) / static_cast<double>(m));
    }
  }

  // Warm start: least squares, refined by IRLS on large systems.
  std::vector<double> v;
  if (m >= kIrlsThreshold) {
    v = irls_warm_start(qp, b, 8);
  } else {
    v = weighted_ls(qp, b, std::vector<double>(m, 1.0));
  }

  std::vector<double> res = matvec(b, v);
  for (std::size_t i = 0; i < m; ++i) res[i] -= qp[i];  // res = B v - q

  // q in span(B): the warm start is already optimal to machine precision.
  if (norm1(res) <= 1e-12 * q_norm1) {
    sol.coeffs = v;
    sol.objective = l1_residual(q, b, v);
    return sol;
  }

  // Strictly feasible epigraph start, then the primal-dual loop.
  std::vector<double> t(m), fu1(m), fu2(m), lam1(m), lam2(m);
  double res_maxabs = 0.0;
  for (double x : res) res_maxabs = std::max(res_maxabs, std::abs(x));
  for (std::size_t i = 0; i < m; ++i) {
    t[i] = 0.95 * std::abs(res[i]) + 0.10 * res_maxabs;
    fu1[i] = res[i] - t[i];
    fu2[i] = -res[i] - t[i];
    lam1[i] = -1.0 / fu1[i];
    lam2[i] = -1.0 / fu2[i];
  }

  std::vector<double> lam_diff(m);
  for (std::size_t i = 0; i < m; ++i) lam_diff[i] = lam1[i] - lam2[i];
  std::vector<double> atv = matvec_transpose(b, lam_diff);  // B^T (lam1 - lam2)

  std::vector<double> best_v = v;
  double best_obj = l1_residual(q, b, v);

  std::vector<double> sig1(m), sig2(m), sigx(m), w1(m), dlam_diff(m), du(m), dlam1(m), dlam2(m);
  std::vector<double> tmp3(m), tmp4(m), w2(m);

  auto residual_norm_sq = [&](const std::vector<double>& atv_, const std::vector<double>& l1_,
                              const std::vector<double>& l2_, const std::vector<double>& f1_,
                              const std::vector<double>& f2_, double inv_tau) {
    double s = 0.0;
    for (double x : atv_) s += x * x;
    for (std::size_t i = 0; i < m; ++i) {
      const double rd = 1.0 - l1_[i] - l2_[i];
      const double rc1 = -l1_[i] * f1_[i] + inv_tau;
      const double rc2 = -l2_[i] * f2_[i] + inv_tau;
      s += rd * rd + rc1 * rc1 + rc2 * rc2;
    }
    return s;
  };

  std::size_t iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    double sdg = 0.0;
    for (std::size_t i = 0; i < m; ++i) sdg -= fu1[i] * lam1[i] + fu2[i] * lam2[i];

    double primal_obj = 0.0;
    for (double ti : t) primal_obj += ti;

    const bool tiny_objective = primal_obj <= 1e-14 * q_norm1;
    if (sdg <= opts.tolerance * std::max(primal_obj, 1e-12 * q_norm1) || tiny_objective) {
      const double obj = l1_residual(q, b, v);
      if (obj < best_obj) {
        best_obj = obj;
        best_v = v;
      }
      sol.coeffs = best_v;
      sol.objective = best_obj;
      sol.iterations = iter;
      sol.status = SolveStatus::Converged;
      return sol;
    }

    const double tau = kBarrierMu * 2.0 * static_cast<double>(m) / sdg;
    const double inv_tau = -1.0 / tau;

    for (std::size_t i = 0; i < m; ++i) {
      tmp3[i] = inv_tau / fu1[i];
      tmp4[i] = inv_tau / fu2[i];
      w2[i] = tmp3[i] + tmp4[i] - 1.0;
      const double l1f = lam1[i] / fu1[i];
      const double l2f = lam2[i] / fu2[i];
      sig1[i] = -l1f - l2f;
      sig2[i] = l1f - l2f;
      sigx[i] = sig1[i] - sig2[i] * sig2[i] / sig1[i];
      w1[i] = tmp4[i] - tmp3[i] - (sig2[i] / sig1[i]) * w2[i];
    }

    const double old_resnorm_sq = residual_norm_sq(atv, lam1, lam2, fu1, fu2, inv_tau);

    std::vector<double> dv;
    try {
      dv = cholesky_solve_spd(gram_weighted(b, sigx), matvec_transpose(b, w1));
    } catch (const std::runtime_error&) {
      break;  // numerically stuck; report the best iterate below
    }

    const std::vector<double> bdv = matvec(b, dv);
    for (std::size_t i = 0; i < m; ++i) {
      du[i] = (w2[i] - sig2[i] * bdv[i]) / sig1[i];
      dlam1[i] = -(lam1[i] / fu1[i]) * (bdv[i] - du[i]) - lam1[i] + tmp3[i];
      dlam2[i] = (lam2[i] / fu2[i]) * (bdv[i] + du[i]) - lam2[i] + tmp4[i];
    }

    // Largest step keeping lam > 0 and fu < 0.
    double s = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (dlam1[i] < 0.0) s = std::min(s, -lam1[i] / dlam1[i]);
      if (dlam2[i] < 0.0) s = std::min(s, -lam2[i] / dlam2[i]);
      const double df1 = bdv[i] - du[i];
      if (df1 > 0.0) s = std::min(s, -fu1[i] / df1);
      const double df2 = -bdv[i] - du[i];
      if (df2 > 0.0) s = std::min(s, -fu2[i] / df2);
    }
    s *= 0.99;

    for (std::size_t i = 0; i < m; ++i) dlam_diff[i] = dlam1[i] - dlam2[i];
    const std::vector<double> datv = matvec_transpose(b, dlam_diff);

    std::vector<double> v_new(r), lam1_new(m), lam2_new(m), fu1_new(m), fu2_new(m), atv_new(r);
    bool accepted = false;
    for (int back = 0; back < 32; ++back) {
      for (std::size_t j = 0; j < r; ++j) {
        v_new[j] = v[j] + s * dv[j];
        atv_new[j] = atv[j] + s * datv[j];
      }
      for (std::size_t i = 0; i < m; ++i) {
        lam1_new[i] = lam1[i] + s * dlam1[i];
        lam2_new[i] = lam2[i] + s * dlam2[i];
        const double t_new = t[i] + s * du[i];
        const double res_new = res[i] + s * bdv[i];
        fu1_new[i] = res_new - t_new;
        fu2_new[i] = -res_new - t_new;
      }
      const double new_resnorm_sq =
          residual_norm_sq(atv_new, lam1_new, lam2_new, fu1_new, fu2_new, inv_tau);
      if (std::sqrt(new_resnorm_sq) <= (1.0 - kLineSearchAlpha * s) * std::sqrt(old_resnorm_sq)) {
        accepted = true;
        break;
      }
      s *= kLineSearchBeta;
    }
    if (!accepted) break;  // stuck backtracking

    for (std::size_t i = 0; i < m; ++i) {
      t[i] += s * du[i];
      res[i] += s * bdv[i];
      fu1[i] = fu1_new[i];
      fu2[i] = fu2_new[i];
      lam1[i] = lam1_new[i];
      lam2[i] = lam2_new[i];
    }
    v = v_new;
    atv = atv_new;

    const double obj = l1_residual(q, b, v);
    if (obj < best_obj) {
      best_obj = obj;
      best_v = v;
    }
  }

  sol.coeffs = best_v;
  sol.objective = best_obj;
  sol.iterations = iter;
  sol.status = SolveStatus::MaxIters;
  return sol;
}

namespace {

// Solves the r x r system block * v = rhs by Gaussian elimination with
// partial pivoting; returns false when the block is numerically singular.
bool solve_small_system(DenseMatrix block, std::vector<double> rhs, std::vector<double>& out) {
  const std::size_t r = block.rows;
  double max_entry = 0.0;
  for (double x : block.data) max_entry = std::max(max_entry, std::abs(x));
  if (max_entry == 0.0) return false;

  std::vector<std::size_t> perm(r);
  for (std::size_t c = 0; c < r; ++c) {
    std::size_t pivot = c;
    for (std::size_t i = c + 1; i < r; ++i) {
      if (std::abs(block.at(i, c)) > std::abs(block.at(pivot, c))) pivot = i;
    }
    if (std::abs(block.at(pivot, c)) <= 1e-12 * max_entry) return false;
    if (pivot != c) {
      for (std::size_t j = 0; j < r; ++j) std::swap(block.at(pivot, j), block.at(c, j));
      std::swap(rhs[pivot], rhs[c]);
    }
    for (std::size_t i = c + 1; i < r; ++i) {
      const double f = block.at(i, c) / block.at(c, c);
      for (std::size_t j = c; j < r; ++j) block.at(i, j) -= f * block.at(c, j);
      rhs[i] -= f * rhs[c];
    }
  }
  out.assign(r, 0.0);
  for (std::size_t ii = r; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t j = ii + 1; j < r; ++j) s -= block.at(ii, j) * out[j];
    out[ii] = s / block.at(ii, ii);
  }
  return true;
}

}  // namespace

OracleResult oracle_l1(const std::vector<double>& q, const DenseMatrix& b) {
  const std::size_t m = q.size();
  const std::size_t r = b.cols;
  if (b.rows != m) {
    throw std::invalid_argument("oracle_l1: q length vs basis " + b.shape_string());
  }
  if (m > 14 || r > 3 || r == 0) {
    throw std::invalid_argument("oracle_l1: limited to m <= 14, r <= 3 (got " +
                                b.shape_string() + ")");
  }

  OracleResult out;
  out.value = norm1(q);  // v = 0 is always feasible

  // All r-subsets of coordinates, in lexicographic order.
  std::vector<std::size_t> idx(r);
  for (std::size_t k = 0; k < r; ++k) idx[k] = k;
  bool any_invertible = false;
  std::vector<double> v;
  while (true) {
    DenseMatrix block(r, r);
    std::vector<double> rhs(r);
    for (std::size_t a = 0; a < r; ++a) {
      rhs[a] = q[idx[a]];
      for (std::size_t c = 0; c < r; ++c) block.at(a, c) = b.at(idx[a], c);
    }
    if (solve_small_system(std::move(block), std::move(rhs), v)) {
      any_invertible = true;
      out.value = std::min(out.value, l1_residual(q, b, v));
    }

    // next combination in lexicographic order
    bool exhausted = true;
    for (std::size_t k = r; k-- > 0;) {
      if (idx[k] != m - r + k) {
        ++idx[k];
        for (std::size_t j = k + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
        exhausted = false;
        break;
      }
    }
    if (exhausted) break;
  }

  if (!any_invertible) {
    // Coarse-to-fine grid refinement around the origin; flagged approximate.
    out.approximate = true;
    std::vector<double> center(r, 0.0);
    double half_width = 4.0 * (norm1(q) + 1.0);
    constexpr int kPointsPerAxis = 13;
    for (int level = 0; level < 14; ++level) {
      std::vector<double> best_point = center;
      std::vector<double> point(r);
      std::vector<int> ticks(r, 0);
      while (true) {
        for (std::size_t a = 0; a < r; ++a) {
          point[a] = center[a] + half_width * (2.0 * ticks[a] / (kPointsPerAxis - 1) - 1.0);
        }
        const double obj = l1_residual(q, b, point);
        if (obj < out.value) {
          out.value = obj;
          best_point = point;
        }
        std::size_t a = 0;
        while (a < r && ++ticks[a] == kPointsPerAxis) ticks[a++] = 0;
        if (a == r) break;
      }
      center = best_point;
      half_width /= 4.0;
    }
  }
  return out;
}

DistanceRecord distance_to_subspace(const QueryVector& q, const SubspaceModel& s,
                                    const SolverOptions& opts) {
  if (q.values.size() != s.ambient_dim) {
    throw std::invalid_argument("distance_to_subspace: query length " +
                                std::to_string(q.values.size()) + " vs ambient dimension " +
                                std::to_string(s.ambient_dim));
  }
  const L1Solution sol = solve_l1(q.values, s.basis, opts);
  return DistanceRecord{s.id, sol.objective, sol.coeffs};
}

}  // namespace l1ns
