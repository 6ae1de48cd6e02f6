#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "l1ns/models.hpp"
#include "l1ns/search.hpp"
#include "l1ns/solver.hpp"

namespace l1ns {

/// Additive query corruption: a sparse spike component plus dense Gaussian
/// noise. All-zero noise means queries lie exactly on their subspace.
struct NoiseModel {
  double corrupt_fraction = 0.05;  // fraction of coordinates hit by spikes
  double corrupt_magnitude = 1.0;  // spike magnitude (before gap scaling)
  double noise_sigma = 0.0;        // dense Gaussian sigma

  bool is_zero() const { return corrupt_fraction * corrupt_magnitude == 0.0 && noise_sigma == 0.0; }
};

struct SyntheticSpec {
  std::size_t n = 2;
  std::size_t ambient_dim = 0;  // D
  std::size_t rank = 0;         // r
  /// Lower edge of the accepted gap band; measured eta lands in
  /// [target_eta, eta_band_factor * target_eta].
  double target_eta = 3.0;
  double eta_band_factor = 2.0;
  std::size_t queries_per_run = 1;
  NoiseModel noise;
  std::uint64_t seed = 0;
};

struct EvalInstance {
  SubspaceCollection collection;
  std::vector<QueryVector> queries;  // labels always set
};

/// Draws n independent random subspaces (orthonormalized Gaussian bases) and
/// labeled queries: an on-subspace point plus noise, with the noise scale
/// adjusted per query until the measured exhaustive gap eta falls in the
/// commanded band. Zero noise skips the banding (eta is infinite).
/// Throws when a query cannot be landed in the band within 1000 attempts.
EvalInstance generate_instance(const SyntheticSpec& spec);

/// Ambient-dimension nearest subspace per query, the ground truth for sweeps.
std::vector<int> exhaustive_winners(const SubspaceCollection& collection,
                                    const std::vector<QueryVector>& queries,
                                    const SolverOptions& opts = {});

struct SweepRow {
  std::size_t d = 0;
  std::size_t trials = 0;
  std::size_t n_back = 0;
  double success_rate = 0.0;  // sketched winner equals the exhaustive winner
  double recall = 0.0;        // exhaustive winner made the candidate set
  double mean_eta = 0.0;      // mean finite gap_eta over queries
  double wall_ms = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Recognition-rate-versus-dimension sweep: one fresh index per d (seed
/// derived from the base seed and d), every query answered through the
/// sketch. d_values must be ascending.
SweepResult sweep_dimension(const EvalInstance& instance, const std::vector<int>& winners,
                            const std::vector<std::size_t>& d_values, const SearchConfig& base);
SweepResult sweep_dimension(const EvalInstance& instance,
                            const std::vector<std::size_t>& d_values, const SearchConfig& base);

/// (d, n_back) grid. The index is built once per d and re-queried per n_back.
SweepResult sweep_nback(const EvalInstance& instance, const std::vector<int>& winners,
                        const std::vector<std::size_t>& d_values,
                        const std::vector<std::size_t>& nback_values, const SearchConfig& base);

/// Fixed header `d,trials,n_back,success_rate,recall,mean_eta,wall_ms`.
/// include_timing=false zeroes the wall_ms column so output bytes depend only
/// on the seed.
std::string sweep_to_csv(const SweepResult& result, bool include_timing = true);

/// One draw of psi = sketched distance / ambient distance at fixed (q, S, d).
struct DistortionSample {
  double psi = 0.0;
  std::size_t d = 0;
  std::size_t r = 0;
  std::uint64_t seed = 0;
};

struct DistortionSummary {
  double q01 = 0.0;
  double median = 0.0;
  double q99 = 0.0;
};

/// psi over num_matrices independent sketches (streams 0..num_matrices-1 of
/// seed). Requires r < d < D and a strictly positive ambient distance.
std::vector<DistortionSample> distortion_histogram(const QueryVector& q, const SubspaceModel& s,
                                                   std::size_t d, std::size_t num_matrices,
                                                   std::uint64_t seed);

DistortionSummary distortion_quantiles(std::vector<DistortionSample> samples);

/// Single `psi` column stream.
std::string distortion_to_csv(const std::vector<DistortionSample>& samples);

// Dataset directory layout: manifest.csv with one line per class
// `class_id,train_file,test_file` (paths relative to the directory, `-` for a
// class without test samples). Each matrix file is CSV or binary with samples
// stored as columns (ambient_dim rows).

/// Fits one subspace per class from its training samples and returns the test
/// samples as labeled queries.
EvalInstance load_external_dataset(const std::filesystem::path& dir, std::size_t r);

/// Inverse of the loader for generated instances: training samples are the
/// basis columns, test samples the queries of that class.
void write_dataset(const std::filesystem::path& dir, const EvalInstance& instance);

}  // namespace l1ns
