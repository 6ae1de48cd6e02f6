#include "l1ns/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <set>
#include <stdexcept>

#include "l1ns/io.hpp"
#include "l1ns/kernels.hpp"
#include "l1ns/linalg.hpp"

namespace l1ns {

namespace {

constexpr char kIndexMagic[7] = {'L', '1', 'N', 'S', 'I', 'D', 'X'};

void validate_config(const SearchConfig& c, std::size_t n, std::size_t ambient_dim) {
  if (c.d < 1) throw std::invalid_argument("SearchConfig: d must be >= 1");
  if (c.identity_sketch) {
    if (c.d != ambient_dim) {
      throw std::invalid_argument("SearchConfig: identity sketch requires d == D");
    }
  } else if (c.d >= ambient_dim) {
    throw std::invalid_argument("SearchConfig: d = " + std::to_string(c.d) +
                                " must be below the ambient dimension " +
                                std::to_string(ambient_dim));
  }
  if (c.trials < 1) throw std::invalid_argument("SearchConfig: trials must be >= 1");
  if (c.n_back < 1 || c.n_back > n) {
    throw std::invalid_argument("SearchConfig: need 1 <= n_back <= n, got " +
                                std::to_string(c.n_back));
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
    throw std::invalid_argument("SearchConfig: alpha must lie in (0,1)");
  }
}

/// Sketched distance of qs to one stored basis, handling the rank-capped
/// case: a basis spanning all of R^d has distance zero with exact
/// coefficients, no LP needed.
DistanceRecord sketched_distance(const std::vector<double>& qs, const DenseMatrix& basis, int id,
                                 const SolverOptions& opts, bool* hit_cap) {
  if (basis.cols >= basis.rows) {
    DistanceRecord rec;
    rec.subspace_id = id;
    rec.distance = 0.0;
    rec.minimizer_coeffs = matvec_transpose(basis, qs);
    return rec;
  }
  const L1Solution sol = solve_l1(qs, basis, opts);
  if (sol.status == SolveStatus::MaxIters && hit_cap != nullptr) *hit_cap = true;
  return DistanceRecord{id, sol.objective, sol.coeffs};
}

/// Captures the first exception thrown inside an OpenMP region so it can be
/// rethrown on the calling thread (exceptions must not cross the region).
class ParallelErrorGuard {
 public:
  template <typename Fn>
  void run(Fn&& fn) noexcept {
    try {
      fn();
    } catch (...) {
#pragma omp critical(l1ns_parallel_error)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow_if_any() const {
    if (error_) std::rethrow_exception(error_);
  }
  bool failed() const { return error_ != nullptr; }

 private:
  std::exception_ptr error_;
};

void rank_records(std::vector<DistanceRecord>& records) {
  std::sort(records.begin(), records.end(), [](const DistanceRecord& a, const DistanceRecord& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.subspace_id < b.subspace_id;
  });
}

/// eta from a ranked list: xi_2/xi_1 with the +inf convention at xi_1 = 0.
void fill_eta(QueryResult& result, const std::vector<DistanceRecord>& ranked_full) {
  const auto& r = result.ranked.size() >= 2 ? result.ranked : ranked_full;
  if (r.size() < 2) {
    result.gap_eta = 1.0;
    return;
  }
  const double xi1 = r[0].distance;
  const double xi2 = r[1].distance;
  if (xi1 == 0.0) {
    result.gap_eta = std::numeric_limits<double>::infinity();
    result.eta_infinite = true;
  } else {
    result.gap_eta = xi2 / xi1;
  }
}

}  // namespace

std::size_t suggest_dimension(std::size_t r, std::size_t n, double alpha) {
  if (n <= r) {
    throw std::invalid_argument("suggest_dimension: the dimension rule assumes n > r (got n = " +
                                std::to_string(n) + ", r = " + std::to_string(r) + ")");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("suggest_dimension: alpha must lie in (0,1)");
  }
  const double base = static_cast<double>(r) * std::log(static_cast<double>(n));
  const double d = std::pow(base, 1.0 / alpha);
  if (!std::isfinite(d) || d > 1e12) {
    throw std::invalid_argument("suggest_dimension: rule overflows for these parameters");
  }
  return static_cast<std::size_t>(std::max(1.0, std::ceil(d)));
}

SketchedIndex build_index(const SubspaceCollection& collection, const SearchConfig& config) {
  validate_config(config, collection.size(), collection.ambient_dim);

  SketchedIndex index;
  index.n = collection.size();
  index.ambient_dim = collection.ambient_dim;
  index.rank = collection.rank;
  index.config = config;

  const std::size_t t_count = config.trials;
  index.sketches.resize(t_count);
  index.sketched_bases.assign(t_count, std::vector<DenseMatrix>(index.n));

  // Distinct streams may be sampled concurrently; stream id = trial index.
  ParallelErrorGuard guard;
  const std::int64_t trials = static_cast<std::int64_t>(t_count);
#pragma omp parallel for schedule(static) if (t_count > 1)
  for (std::int64_t t = 0; t < trials; ++t) {
    guard.run([&, t] {
      if (config.identity_sketch) {
        SketchMatrix sk;
        sk.rng = RngSpec{config.seed, static_cast<std::uint64_t>(t)};
        sk.d = config.d;
        sk.ambient_dim = index.ambient_dim;
        sk.p = identity_matrix(config.d);
        index.sketches[static_cast<std::size_t>(t)] = std::move(sk);
      } else {
        index.sketches[static_cast<std::size_t>(t)] =
            sample_sketch(RngSpec{config.seed, static_cast<std::uint64_t>(t)}, config.d,
                          index.ambient_dim);
      }
    });
  }
  guard.rethrow_if_any();

  const std::int64_t cells = static_cast<std::int64_t>(t_count * index.n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    guard.run([&, cell] {
      const std::size_t t = static_cast<std::size_t>(cell) / index.n;
      const std::size_t i = static_cast<std::size_t>(cell) % index.n;
      const DenseMatrix projected = matmul(index.sketches[t].p, collection.models[i].basis);
      const std::size_t expected_rank = std::min(config.d, index.rank);
      DenseMatrix basis;
      if (config.d >= index.rank) {
        try {
          basis = orthonormalize(projected);
        } catch (const std::invalid_argument& e) {
          throw std::runtime_error("build_index: projected basis of subspace " +
                                   std::to_string(i) + " in trial " + std::to_string(t) +
                                   " lost rank: " + e.what());
        }
      } else {
        // d < r: the projection of an r-dimensional subspace fills R^d, so the
        // stored basis is rank-capped at d columns by construction.
        basis = span_basis(projected);
        if (basis.cols < expected_rank) {
          throw std::runtime_error("build_index: projected basis of subspace " +
                                   std::to_string(i) + " in trial " + std::to_string(t) +
                                   " has rank " + std::to_string(basis.cols) + " < " +
                                   std::to_string(expected_rank));
        }
      }
      index.sketched_bases[t][i] = std::move(basis);
    });
  }
  guard.rethrow_if_any();
  return index;
}

QueryResult query_sketched(const SketchedIndex& index, const QueryVector& q,
                           const SearchConfig& config,
                           const SubspaceCollection* ambient) {
  if (q.values.size() != index.ambient_dim) {
    throw std::invalid_argument("query_sketched: query length " +
                                std::to_string(q.values.size()) + " vs ambient dimension " +
                                std::to_string(index.ambient_dim));
  }
  const std::size_t n = index.n;
  const std::size_t t_count = index.sketches.size();
  if (config.n_back < 1 || config.n_back > n) {
    throw std::invalid_argument("query_sketched: need 1 <= n_back <= n");
  }
  if (config.verify) {
    if (ambient == nullptr) {
      throw std::invalid_argument("query_sketched: verification requires the ambient collection");
    }
    if (ambient->size() != n || ambient->ambient_dim != index.ambient_dim) {
      throw std::invalid_argument("query_sketched: ambient collection does not match the index");
    }
  }

  QueryResult result;
  result.sketched_distances.assign(t_count, std::vector<double>(n, 0.0));
  std::vector<std::vector<DistanceRecord>> trial_records(t_count,
                                                         std::vector<DistanceRecord>(n));
  std::vector<char> capped(t_count * n, 0);

  std::vector<std::vector<double>> sketched_queries(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    sketched_queries[t] = matvec(index.sketches[t].p, q.values);
  }

  ParallelErrorGuard guard;
  const std::int64_t cells = static_cast<std::int64_t>(t_count * n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    guard.run([&, cell] {
      const std::size_t t = static_cast<std::size_t>(cell) / n;
      const std::size_t i = static_cast<std::size_t>(cell) % n;
      bool cap = false;
      trial_records[t][i] = sketched_distance(sketched_queries[t], index.sketched_bases[t][i],
                                              static_cast<int>(i), config.sketched_solver, &cap);
      result.sketched_distances[t][i] = trial_records[t][i].distance;
      capped[cell] = cap ? 1 : 0;
    });
  }
  guard.rethrow_if_any();

  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (capped[t * n + i]) result.flagged_ids.push_back(static_cast<int>(i));
    }
  }
  std::sort(result.flagged_ids.begin(), result.flagged_ids.end());
  result.flagged_ids.erase(std::unique(result.flagged_ids.begin(), result.flagged_ids.end()),
                           result.flagged_ids.end());

  // Per-trial shortlists, then the union across trials.
  std::set<int> candidates;
  for (std::size_t t = 0; t < t_count; ++t) {
    std::vector<DistanceRecord> order = trial_records[t];
    rank_records(order);
    for (std::size_t k = 0; k < config.n_back; ++k) candidates.insert(order[k].subspace_id);
  }
  result.candidate_ids.assign(candidates.begin(), candidates.end());

  // Minimum sketched distance across trials per candidate (also the ranking
  // key when verification is off).
  auto min_sketched_record = [&](int id) {
    DistanceRecord best = trial_records[0][static_cast<std::size_t>(id)];
    for (std::size_t t = 1; t < t_count; ++t) {
      const DistanceRecord& rec = trial_records[t][static_cast<std::size_t>(id)];
      if (rec.distance < best.distance) best = rec;
    }
    return best;
  };

  std::vector<DistanceRecord> ranked_sketched_all(n);
  for (std::size_t i = 0; i < n; ++i) ranked_sketched_all[i] = min_sketched_record(static_cast<int>(i));
  rank_records(ranked_sketched_all);

  if (config.verify) {
    result.verified = true;
    result.ranked.resize(result.candidate_ids.size());
    const std::int64_t c_count = static_cast<std::int64_t>(result.candidate_ids.size());
#pragma omp parallel for schedule(dynamic) if (c_count > 1)
    for (std::int64_t c = 0; c < c_count; ++c) {
      guard.run([&, c] {
        const int id = result.candidate_ids[static_cast<std::size_t>(c)];
        result.ranked[static_cast<std::size_t>(c)] =
            distance_to_subspace(q, ambient->models[static_cast<std::size_t>(id)],
                                 config.ambient_solver);
      });
    }
    guard.rethrow_if_any();
    rank_records(result.ranked);
  } else {
    result.ranked.reserve(result.candidate_ids.size());
    for (int id : result.candidate_ids) result.ranked.push_back(min_sketched_record(id));
    rank_records(result.ranked);
  }

  result.winner_id = result.ranked.front().subspace_id;
  fill_eta(result, ranked_sketched_all);
  return result;
}

QueryResult query_exhaustive(const SubspaceCollection& collection, const QueryVector& q,
                             const SolverOptions& opts) {
  if (q.values.size() != collection.ambient_dim) {
    throw std::invalid_argument("query_exhaustive: query length " +
                                std::to_string(q.values.size()) + " vs ambient dimension " +
                                std::to_string(collection.ambient_dim));
  }
  QueryResult result;
  const std::size_t n = collection.size();
  result.ranked.resize(n);
  ParallelErrorGuard guard;
  const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    guard.run([&, i] {
      result.ranked[static_cast<std::size_t>(i)] =
          distance_to_subspace(q, collection.models[static_cast<std::size_t>(i)], opts);
    });
  }
  guard.rethrow_if_any();
  rank_records(result.ranked);
  result.winner_id = result.ranked.front().subspace_id;
  result.verified = true;
  result.candidate_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.candidate_ids[i] = static_cast<int>(i);
  fill_eta(result, result.ranked);
  return result;
}

double gap_statistic(const QueryResult& result, std::size_t k_prime) {
  if (k_prime < 1 || result.ranked.size() < k_prime) {
    throw std::invalid_argument("gap_statistic: ranking has " +
                                std::to_string(result.ranked.size()) + " entries, need k' = " +
                                std::to_string(k_prime));
  }
  const double xi1 = result.ranked.front().distance;
  const double xik = result.ranked[k_prime - 1].distance;
  if (xi1 == 0.0) return std::numeric_limits<double>::infinity();
  return xik / xi1;
}

void save_index(const std::filesystem::path& path, const SketchedIndex& index) {
  std::string out;
  out.append(kIndexMagic, sizeof(kIndexMagic));
  append_u32(out, kIndexFormatVersion);
  append_u64(out, index.n);
  append_u64(out, index.ambient_dim);
  append_u64(out, index.rank);
  append_u64(out, index.sketches.size());
  append_u64(out, index.config.d);
  append_u64(out, index.config.seed);
  append_f64(out, index.config.alpha);
  append_u64(out, index.config.n_back);
  for (const SketchMatrix& sk : index.sketches) out += encode_matrix_binary(sk.p);
  for (const auto& trial : index.sketched_bases) {
    for (const DenseMatrix& basis : trial) out += encode_matrix_binary(basis);
  }
  atomic_write(path, [&](const std::filesystem::path& tmp) { write_file_bytes(tmp, out); });
}

SketchedIndex load_index(const std::filesystem::path& path) {
  const std::string buf = read_file_bytes(path);
  std::size_t pos = 0;
  if (buf.size() < sizeof(kIndexMagic) ||
      std::memcmp(buf.data(), kIndexMagic, sizeof(kIndexMagic)) != 0) {
    throw std::runtime_error(path.string() + ": not an index file (bad magic)");
  }
  pos += sizeof(kIndexMagic);
  const std::uint32_t version = read_u32(buf, pos);
  if (version != kIndexFormatVersion) {
    throw std::runtime_error(path.string() + ": unsupported index version " +
                             std::to_string(version));
  }
  SketchedIndex index;
  index.n = read_u64(buf, pos);
  index.ambient_dim = read_u64(buf, pos);
  index.rank = read_u64(buf, pos);
  const std::uint64_t t_count = read_u64(buf, pos);
  index.config.d = read_u64(buf, pos);
  index.config.seed = read_u64(buf, pos);
  index.config.alpha = read_f64(buf, pos);
  index.config.n_back = read_u64(buf, pos);
  index.config.trials = t_count;

  index.sketches.resize(t_count);
  for (std::uint64_t t = 0; t < t_count; ++t) {
    SketchMatrix sk;
    sk.p = decode_matrix_binary(buf, pos);
    sk.rng = RngSpec{index.config.seed, t};
    sk.d = sk.p.rows;
    sk.ambient_dim = sk.p.cols;
    index.sketches[t] = std::move(sk);
  }
  index.sketched_bases.assign(t_count, std::vector<DenseMatrix>(index.n));
  for (std::uint64_t t = 0; t < t_count; ++t) {
    for (std::size_t i = 0; i < index.n; ++i) {
      index.sketched_bases[t][i] = decode_matrix_binary(buf, pos);
    }
  }
  if (pos != buf.size()) {
    throw std::runtime_error(path.string() + ": trailing bytes after index payload");
  }
  return index;
}

}  // namespace l1ns
