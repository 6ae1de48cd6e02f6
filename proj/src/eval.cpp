#include "l1ns/eval.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include "l1ns/cauchy.hpp"
#include "l1ns/io.hpp"
#include "l1ns/kernels.hpp"
#include "l1ns/linalg.hpp"

namespace l1ns {

namespace {

// Stream-id layout of the generator seed space.
constexpr std::uint64_t kBasisStreamBase = 0x100000000ull;
constexpr std::uint64_t kQueryStreamBase = 0x200000000ull;
constexpr int kMaxAttemptsPerQuery = 1000;

// Banding solves do not need the full default precision.
SolverOptions generator_solver_options() {
  SolverOptions opts;
  opts.tolerance = 1e-7;
  opts.max_iterations = 150;
  return opts;
}

void validate_spec(const SyntheticSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("SyntheticSpec: need n >= 2");
  if (spec.rank < 1) throw std::invalid_argument("SyntheticSpec: need rank >= 1");
  if (spec.ambient_dim <= 2 * spec.rank) {
    throw std::invalid_argument("SyntheticSpec: need ambient_dim > 2*rank");
  }
  if (!(spec.target_eta > 1.0)) throw std::invalid_argument("SyntheticSpec: target_eta must exceed 1");
  if (!(spec.eta_band_factor > 1.0)) {
    throw std::invalid_argument("SyntheticSpec: eta_band_factor must exceed 1");
  }
  if (spec.queries_per_run < 1) throw std::invalid_argument("SyntheticSpec: need queries");
  if (spec.noise.corrupt_fraction < 0.0 || spec.noise.corrupt_fraction >= 1.0) {
    throw std::invalid_argument("SyntheticSpec: corrupt_fraction must lie in [0,1)");
  }
  if (spec.noise.corrupt_magnitude < 0.0 || spec.noise.noise_sigma < 0.0) {
    throw std::invalid_argument("SyntheticSpec: noise magnitudes must be nonnegative");
  }
}

// d(v + s*e, S_j) for the fixed direction pair, with evaluations cached so
// Lipschitz bounds (|g(s) - g(s')| <= |s - s'| * ||e||_1) can prune later
// passes over the competitors.
struct CompetitorCache {
  std::vector<std::vector<std::pair<double, double>>> evals;  // per j: (s, g)
  double lipschitz = 0.0;

  double lower_bound(std::size_t j, double s) const {
    double best = 0.0;
    for (const auto& [se, ge] : evals[j]) {
      best = std::max(best, ge - std::abs(s - se) * lipschitz);
    }
    return best;
  }
};

// Exact min_j d(v + s*e, S_j) over j != label, pruned by cached bounds.
double min_competitor_distance(const SubspaceCollection& collection, int label,
                               const std::vector<double>& v, const std::vector<double>& e,
                               double s, CompetitorCache& cache, const SolverOptions& opts) {
  const std::size_t n = collection.size();
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] + s * e[i];
  const QueryVector q(w);

  std::vector<std::size_t> order;
  order.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<int>(j) != label) order.push_back(j);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cache.lower_bound(a, s) < cache.lower_bound(b, s);
  });

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j : order) {
    if (cache.lower_bound(j, s) >= best) break;  // sound: bounds only grow later in the order
    const double g = distance_to_subspace(q, collection.models[j], opts).distance;
    cache.evals[j].emplace_back(s, g);
    best = std::min(best, g);
  }
  return best;
}

std::vector<double> draw_noise_direction(UniformStream& stream, const NoiseModel& noise,
                                         std::size_t ambient_dim) {
  std::vector<double> e(ambient_dim, 0.0);
  const std::size_t num_corrupt =
      static_cast<std::size_t>(std::llround(noise.corrupt_fraction * static_cast<double>(ambient_dim)));
  if (num_corrupt > 0 && noise.corrupt_magnitude > 0.0) {
    // Partial Fisher-Yates for distinct spike positions.
    std::vector<std::size_t> pool(ambient_dim);
    for (std::size_t i = 0; i < ambient_dim; ++i) pool[i] = i;
    for (std::size_t k = 0; k < num_corrupt; ++k) {
      const std::size_t pick = k + stream.next_index(ambient_dim - k);
      std::swap(pool[k], pool[pick]);
      const double sign = (stream.next_u64() & 1u) ? 1.0 : -1.0;
      e[pool[k]] += sign * noise.corrupt_magnitude;
    }
  }
  if (noise.noise_sigma > 0.0) {
    for (std::size_t i = 0; i < ambient_dim; ++i) e[i] += noise.noise_sigma * stream.next_gaussian();
  }
  return e;
}

}  // namespace

EvalInstance generate_instance(const SyntheticSpec& spec) {
  validate_spec(spec);
  const std::size_t n = spec.n;
  const std::size_t ambient = spec.ambient_dim;
  const std::size_t r = spec.rank;

  std::vector<SubspaceModel> models(n);
  {
    std::exception_ptr error;
    const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      try {
        UniformStream stream(RngSpec{spec.seed, kBasisStreamBase + static_cast<std::uint64_t>(i)});
        DenseMatrix g(ambient, r);
        for (double& x : g.data) x = stream.next_gaussian();
        models[static_cast<std::size_t>(i)] =
            SubspaceModel(static_cast<int>(i), orthonormalize(g));
      } catch (...) {
#pragma omp critical(l1ns_generate_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  }
  EvalInstance instance{SubspaceCollection(std::move(models)), {}};
  const SubspaceCollection& collection = instance.collection;

  const SolverOptions band_opts = generator_solver_options();
  const double band_lo = spec.target_eta;
  const double band_hi = spec.target_eta * spec.eta_band_factor;
  // Aim inside the band so that re-measuring with tighter solves stays in it.
  const double inner_lo = band_lo * (1.0 + 1e-6);
  const double inner_hi = band_hi * (1.0 - 1e-6);
  const double inner_mid = 0.5 * (inner_lo + inner_hi);

  instance.queries.resize(spec.queries_per_run);
  std::exception_ptr error;
  const std::int64_t q_count = static_cast<std::int64_t>(spec.queries_per_run);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < q_count; ++k) {
    try {
      const int label = static_cast<int>(static_cast<std::size_t>(k) % n);
      const DenseMatrix& basis = collection.models[static_cast<std::size_t>(label)].basis;
      bool landed = false;
      for (int attempt = 0; attempt < kMaxAttemptsPerQuery && !landed; ++attempt) {
        UniformStream stream(RngSpec{
            spec.seed, kQueryStreamBase + (static_cast<std::uint64_t>(k) << 10) +
                           static_cast<std::uint64_t>(attempt)});
        std::vector<double> coeffs(r);
        for (double& c : coeffs) c = stream.next_gaussian();
        std::vector<double> v = matvec(basis, coeffs);
        const double v_scale = norm1(v);
        if (v_scale <= 1e-300) continue;
        for (double& x : v) x /= v_scale;

        if (spec.noise.is_zero()) {
          instance.queries[static_cast<std::size_t>(k)] = QueryVector(v, label);
          landed = true;
          break;
        }

        std::vector<double> e = draw_noise_direction(stream, spec.noise, ambient);
        const double e_norm1 = norm1(e);
        if (e_norm1 == 0.0) continue;

        // v lies in S_label, so d(v + s e, S_label) = s * d(e, S_label).
        const double d_e =
            distance_to_subspace(QueryVector(e), collection.models[static_cast<std::size_t>(label)], band_opts)
                .distance;
        if (d_e <= 1e-10 * e_norm1) continue;

        CompetitorCache cache;
        cache.evals.assign(n, {});
        cache.lipschitz = e_norm1;

        auto eta_at = [&](double s) {
          const double xi2 = min_competitor_distance(collection, label, v, e, s, cache, band_opts);
          return xi2 / (s * d_e);
        };

        // Fixed-point proposals on s (eta moves like 1/s), safeguarded by a
        // bracket [s_lo, s_hi] with eta(s_lo) > band, eta(s_hi) < band.
        double s = 0.5 / e_norm1;
        double s_lo = 0.0;
        double s_hi = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 48; ++iter) {
          const double eta = eta_at(s);
          if (eta >= inner_lo && eta <= inner_hi) {
            std::vector<double> q = v;
            for (std::size_t i = 0; i < ambient; ++i) q[i] += s * e[i];
            instance.queries[static_cast<std::size_t>(k)] = QueryVector(std::move(q), label);
            landed = true;
            break;
          }
          if (eta > inner_hi) {
            s_lo = std::max(s_lo, s);
          } else {
            s_hi = std::min(s_hi, s);
          }
          // eta(s) = xi2(s) / (s d_e) with slowly-varying xi2: propose the s
          // that would hit mid-band at frozen xi2.
          double proposal = eta * s / inner_mid;
          if (!(proposal > s_lo && proposal < s_hi)) {
            proposal = std::isinf(s_hi) ? 2.0 * std::max(s, s_lo) : 0.5 * (s_lo + s_hi);
          }
          if (!(proposal > 0.0) || proposal > 1e9 / e_norm1 ||
              (s_hi - s_lo) <= 1e-12 * s_hi) {
            break;  // band unreachable for this draw; redraw the noise
          }
          s = proposal;
        }
      }
      if (!landed) {
        throw std::runtime_error(
            "generate_instance: query " + std::to_string(k) + " could not land eta in [" +
            std::to_string(band_lo) + ", " + std::to_string(band_hi) +
            "] after 1000 attempts; loosen the band, raise target_eta, or change the noise model");
      }
    } catch (...) {
#pragma omp critical(l1ns_generate_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return instance;
}

std::vector<int> exhaustive_winners(const SubspaceCollection& collection,
                                    const std::vector<QueryVector>& queries,
                                    const SolverOptions& opts) {
  std::vector<int> winners(queries.size(), -1);
  std::exception_ptr error;
  const std::int64_t count = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      winners[static_cast<std::size_t>(k)] =
          query_exhaustive(collection, queries[static_cast<std::size_t>(k)], opts).winner_id;
    } catch (...) {
#pragma omp critical(l1ns_eval_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return winners;
}

namespace {

SweepRow run_sweep_cell(const EvalInstance& instance, const std::vector<int>& winners,
                        const SketchedIndex& index, const SearchConfig& cfg) {
  const std::size_t q_count = instance.queries.size();
  std::vector<char> success(q_count, 0);
  std::vector<char> recalled(q_count, 0);
  std::vector<double> etas(q_count, 0.0);
  std::vector<char> eta_finite(q_count, 0);

  std::exception_ptr error;
  const std::int64_t count = static_cast<std::int64_t>(q_count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      const std::size_t kk = static_cast<std::size_t>(k);
      const QueryResult res = query_sketched(index, instance.queries[kk], cfg,
                                             cfg.verify ? &instance.collection : nullptr);
      success[kk] = (res.winner_id == winners[kk]) ? 1 : 0;
      recalled[kk] = std::binary_search(res.candidate_ids.begin(), res.candidate_ids.end(),
                                        winners[kk])
                         ? 1
                         : 0;
      if (!res.eta_infinite && std::isfinite(res.gap_eta)) {
        etas[kk] = res.gap_eta;
        eta_finite[kk] = 1;
      }
    } catch (...) {
#pragma omp critical(l1ns_eval_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  SweepRow row;
  row.d = cfg.d;
  row.trials = cfg.trials;
  row.n_back = cfg.n_back;
  std::size_t n_success = 0;
  std::size_t n_recall = 0;
  std::size_t n_eta = 0;
  double eta_sum = 0.0;
  for (std::size_t k = 0; k < q_count; ++k) {
    n_success += success[k];
    n_recall += recalled[k];
    if (eta_finite[k]) {
      eta_sum += etas[k];
      ++n_eta;
    }
  }
  row.success_rate = static_cast<double>(n_success) / static_cast<double>(q_count);
  row.recall = static_cast<double>(n_recall) / static_cast<double>(q_count);
  row.mean_eta = n_eta > 0 ? eta_sum / static_cast<double>(n_eta) : 0.0;
  return row;
}

void require_ascending(const std::vector<std::size_t>& values, const char* what) {
  if (values.empty()) throw std::invalid_argument(std::string(what) + ": empty value list");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= values[i - 1]) {
      throw std::invalid_argument(std::string(what) + ": values must be strictly ascending");
    }
  }
}

}  // namespace

SweepResult sweep_dimension(const EvalInstance& instance, const std::vector<int>& winners,
                            const std::vector<std::size_t>& d_values, const SearchConfig& base) {
  require_ascending(d_values, "sweep_dimension");
  if (winners.size() != instance.queries.size()) {
    throw std::invalid_argument("sweep_dimension: winners/queries size mismatch");
  }
  SweepResult result;
  for (const std::size_t d : d_values) {
    SearchConfig cfg = base;
    cfg.d = d;
    cfg.seed = derive_seed(base.seed, d);
    const double t0 = omp_get_wtime();
    const SketchedIndex index = build_index(instance.collection, cfg);
    SweepRow row = run_sweep_cell(instance, winners, index, cfg);
    row.wall_ms = (omp_get_wtime() - t0) * 1e3;
    result.rows.push_back(row);
  }
  return result;
}

SweepResult sweep_dimension(const EvalInstance& instance,
                            const std::vector<std::size_t>& d_values, const SearchConfig& base) {
  return sweep_dimension(instance,
                         exhaustive_winners(instance.collection, instance.queries,
                                            base.ambient_solver),
                         d_values, base);
}

SweepResult sweep_nback(const EvalInstance& instance, const std::vector<int>& winners,
                        const std::vector<std::size_t>& d_values,
                        const std::vector<std::size_t>& nback_values, const SearchConfig& base) {
  require_ascending(d_values, "sweep_nback");
  require_ascending(nback_values, "sweep_nback");
  if (winners.size() != instance.queries.size()) {
    throw std::invalid_argument("sweep_nback: winners/queries size mismatch");
  }
  SweepResult result;
  for (const std::size_t d : d_values) {
    SearchConfig cfg = base;
    cfg.d = d;
    cfg.seed = derive_seed(base.seed, d);
    const SketchedIndex index = build_index(instance.collection, cfg);
    for (const std::size_t nb : nback_values) {
      SearchConfig cell_cfg = cfg;
      cell_cfg.n_back = nb;
      const double t0 = omp_get_wtime();
      SweepRow row = run_sweep_cell(instance, winners, index, cell_cfg);
      row.wall_ms = (omp_get_wtime() - t0) * 1e3;
      result.rows.push_back(row);
    }
  }
  return result;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  out.append(buf, ptr);
}

}  // namespace

std::string sweep_to_csv(const SweepResult& result, bool include_timing) {
  std::string out = "d,trials,n_back,success_rate,recall,mean_eta,wall_ms\n";
  for (const SweepRow& row : result.rows) {
    out += std::to_string(row.d);
    out += ',';
    out += std::to_string(row.trials);
    out += ',';
    out += std::to_string(row.n_back);
    out += ',';
    append_double(out, row.success_rate);
    out += ',';
    append_double(out, row.recall);
    out += ',';
    append_double(out, row.mean_eta);
    out += ',';
    append_double(out, include_timing ? row.wall_ms : 0.0);
    out += '\n';
  }
  return out;
}

std::vector<DistortionSample> distortion_histogram(const QueryVector& q, const SubspaceModel& s,
                                                   std::size_t d, std::size_t num_matrices,
                                                   std::uint64_t seed) {
  if (num_matrices < 1) throw std::invalid_argument("distortion_histogram: need >= 1 matrix");
  if (d <= s.rank || d >= s.ambient_dim) {
    throw std::invalid_argument("distortion_histogram: need rank < d < ambient_dim");
  }
  if (q.values.size() != s.ambient_dim) {
    throw std::invalid_argument("distortion_histogram: query/subspace dimension mismatch");
  }
  const double ambient_distance = distance_to_subspace(q, s).distance;
  if (ambient_distance <= 1e-12 * std::max(norm1(q.values), 1e-300)) {
    throw std::invalid_argument(
        "distortion_histogram: ambient distance is zero; psi is undefined");
  }

  std::vector<DistortionSample> samples(num_matrices);
  std::exception_ptr error;
  const std::int64_t count = static_cast<std::int64_t>(num_matrices);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      const SketchMatrix sk =
          sample_sketch(RngSpec{seed, static_cast<std::uint64_t>(k)}, d, s.ambient_dim);
      const DenseMatrix sketched_basis = orthonormalize(matmul(sk.p, s.basis));
      const std::vector<double> qs = matvec(sk.p, q.values);
      const double sketched = solve_l1(qs, sketched_basis).objective;
      samples[static_cast<std::size_t>(k)] =
          DistortionSample{sketched / ambient_distance, d, s.rank, seed};
    } catch (...) {
#pragma omp critical(l1ns_eval_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return samples;
}

DistortionSummary distortion_quantiles(std::vector<DistortionSample> samples) {
  if (samples.empty()) throw std::invalid_argument("distortion_quantiles: no samples");
  std::vector<double> psi(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) psi[i] = samples[i].psi;
  std::sort(psi.begin(), psi.end());
  const auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(psi.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, psi.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return psi[lo] * (1.0 - frac) + psi[hi] * frac;
  };
  return DistortionSummary{quantile(0.01), quantile(0.50), quantile(0.99)};
}

std::string distortion_to_csv(const std::vector<DistortionSample>& samples) {
  std::string out = "psi\n";
  for (const DistortionSample& s : samples) {
    append_double(out, s.psi);
    out += '\n';
  }
  return out;
}

namespace {

struct ManifestEntry {
  int class_id = 0;
  std::string train_file;
  std::string test_file;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open manifest");
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ManifestEntry entry;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                               ": expected class_id,train_file,test_file");
    }
    const std::string id_str = line.substr(0, c1);
    const auto [ptr, ec] =
        std::from_chars(id_str.data(), id_str.data() + id_str.size(), entry.class_id);
    if (ec != std::errc() || ptr != id_str.data() + id_str.size()) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                               ": bad class id '" + id_str + "'");
    }
    entry.train_file = line.substr(c1 + 1, c2 - c1 - 1);
    entry.test_file = line.substr(c2 + 1);
    if (entry.train_file.empty()) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                               ": empty train file");
    }
    entries.push_back(std::move(entry));
  }
  if (entries.empty()) throw std::runtime_error(path.string() + ": empty manifest");
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.class_id < b.class_id; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].class_id != static_cast<int>(i)) {
      throw std::runtime_error(path.string() + ": class ids must be contiguous from 0");
    }
  }
  return entries;
}

DenseMatrix read_dataset_matrix(const std::filesystem::path& dir, const std::string& name) {
  const std::filesystem::path path = dir / name;
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("dataset manifest references missing file: " + path.string());
  }
  return read_matrix_any(path);
}

}  // namespace

EvalInstance load_external_dataset(const std::filesystem::path& dir, std::size_t r) {
  const auto entries = read_manifest(dir / "manifest.csv");
  std::vector<SubspaceModel> models(entries.size());
  std::vector<std::vector<QueryVector>> per_class_queries(entries.size());

  std::size_t ambient = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const DenseMatrix train = read_dataset_matrix(dir, entries[i].train_file);
    if (i == 0) {
      ambient = train.rows;
    } else if (train.rows != ambient) {
      throw std::runtime_error("dataset: " + entries[i].train_file + " has ambient dimension " +
                               std::to_string(train.rows) + ", expected " +
                               std::to_string(ambient));
    }
    models[i] = fit_subspace(train, r, entries[i].class_id);
    if (entries[i].test_file != "-") {
      const DenseMatrix test = read_dataset_matrix(dir, entries[i].test_file);
      if (test.rows != ambient) {
        throw std::runtime_error("dataset: " + entries[i].test_file + " has ambient dimension " +
                                 std::to_string(test.rows) + ", expected " +
                                 std::to_string(ambient));
      }
      for (std::size_t j = 0; j < test.cols; ++j) {
        per_class_queries[i].emplace_back(test.column(j), entries[i].class_id);
      }
    }
  }

  EvalInstance instance{SubspaceCollection(std::move(models)), {}};
  for (auto& qs : per_class_queries) {
    for (auto& q : qs) instance.queries.push_back(std::move(q));
  }
  return instance;
}

void write_dataset(const std::filesystem::path& dir, const EvalInstance& instance) {
  std::filesystem::create_directories(dir);
  const std::size_t n = instance.collection.size();
  std::vector<std::vector<const QueryVector*>> per_class(n);
  for (const QueryVector& q : instance.queries) {
    if (!q.label.has_value()) {
      throw std::invalid_argument("write_dataset: every query needs a label");
    }
    const int label = *q.label;
    if (label < 0 || static_cast<std::size_t>(label) >= n) {
      throw std::invalid_argument("write_dataset: label " + std::to_string(label) +
                                  " out of range");
    }
    per_class[static_cast<std::size_t>(label)].push_back(&q);
  }

  std::string manifest;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string train_name = "class_" + std::to_string(i) + "_train.bin";
    const std::string test_name = "class_" + std::to_string(i) + "_test.bin";
    write_matrix_binary(dir / train_name, instance.collection.models[i].basis);
    if (per_class[i].empty()) {
      manifest += std::to_string(i) + "," + train_name + ",-\n";
    } else {
      DenseMatrix test(instance.collection.ambient_dim, per_class[i].size());
      for (std::size_t j = 0; j < per_class[i].size(); ++j) {
        test.set_column(j, per_class[i][j]->values);
      }
      write_matrix_binary(dir / test_name, test);
      manifest += std::to_string(i) + "," + train_name + "," + test_name + "\n";
    }
  }
  atomic_write(dir / "manifest.csv",
               [&](const std::filesystem::path& tmp) { write_file_bytes(tmp, manifest); });
}

}  // namespace l1ns
