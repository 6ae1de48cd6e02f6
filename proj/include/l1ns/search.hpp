#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "l1ns/cauchy.hpp"
#include "l1ns/models.hpp"
#include "l1ns/solver.hpp"

namespace l1ns {

struct SearchConfig {
  std::size_t d = 0;       // sketch dimension (0 = pick via suggest_dimension)
  std::size_t trials = 1;  // independent sketches, one RNG stream each
  std::size_t n_back = 1;  // candidates kept per trial for verification
  double alpha = 0.9;      // exponent knob of the dimension rule
  std::uint64_t seed = 0;
  SolverOptions sketched_solver;
  SolverOptions ambient_solver;
  bool verify = false;
  /// Test hook: replaces every P_t with the identity (requires d == D), so
  /// sketched distances equal ambient distances exactly.
  bool identity_sketch = false;
};

/// Sketch-dimension rule d = ceil((r ln n)^(1/alpha)). The constant 1 and the
/// natural log match the reference arithmetic 9 ln 38 ~ 33 for alpha -> 1;
/// the rule is a default, not a cap, and callers may override d freely.
/// Requires n > r and 0 < alpha < 1.
std::size_t suggest_dimension(std::size_t r, std::size_t n, double alpha);

/// The persisted preprocessing product: per-trial sketches P_t and the
/// orthonormalized projections of every basis. When d < r a projected basis
/// spans all of R^d and is stored rank-capped (d columns); queries then see a
/// zero sketched distance for it.
struct SketchedIndex {
  std::vector<SketchMatrix> sketches;                    // T entries
  std::vector<std::vector<DenseMatrix>> sketched_bases;  // [trial][subspace]
  std::size_t n = 0;
  std::size_t ambient_dim = 0;
  std::size_t rank = 0;
  SearchConfig config;  // configuration used at build time
};

SketchedIndex build_index(const SubspaceCollection& collection, const SearchConfig& config);

struct QueryResult {
  /// Candidates ranked ascending by distance, ties by lowest id. Ambient
  /// distances when verified, otherwise the minimum sketched distance across
  /// trials. query_exhaustive ranks every subspace.
  std::vector<DistanceRecord> ranked;
  int winner_id = -1;
  /// Full per-trial sketched distance table, [trial][subspace id]. Empty for
  /// query_exhaustive.
  std::vector<std::vector<double>> sketched_distances;
  std::vector<int> candidate_ids;  // union of per-trial shortlists, ascending
  std::vector<int> flagged_ids;    // subspaces whose solve hit the iteration cap
  /// Ratio of second-smallest to smallest distance in the final ranking
  /// (falls back to the sketched ranking when fewer than two candidates were
  /// ranked). +inf with eta_infinite set when the smallest distance is zero.
  double gap_eta = 1.0;
  bool eta_infinite = false;
  bool verified = false;
};

/// Sketch-space search: for each trial solve the n small regressions against
/// P_t q, keep the n_back closest, union the shortlists across trials, then
/// either verify each candidate in the ambient dimension (config.verify, needs
/// the ambient collection) or rank by minimum sketched distance.
QueryResult query_sketched(const SketchedIndex& index, const QueryVector& q,
                           const SearchConfig& config,
                           const SubspaceCollection* ambient = nullptr);

/// Ground-truth baseline: ambient-dimension solve against every subspace.
QueryResult query_exhaustive(const SubspaceCollection& collection, const QueryVector& q,
                             const SolverOptions& opts = {});

/// xi_{k'} / xi_{1'} of the ranking. Returns +inf when xi_{1'} == 0.
double gap_statistic(const QueryResult& result, std::size_t k_prime);

// Index file: magic "L1NSIDX", version u32, then n, D, r, T, d (u64 each),
// seed u64, alpha f64, n_back u64, followed by each P_t in the binary matrix
// format, then all sketched bases in trial-major, id-minor order. P is stored
// explicitly rather than re-derived from the seed so existing indexes survive
// RNG changes.
inline constexpr std::uint32_t kIndexFormatVersion = 1;

void save_index(const std::filesystem::path& path, const SketchedIndex& index);
SketchedIndex load_index(const std::filesystem::path& path);

}  // namespace l1ns
