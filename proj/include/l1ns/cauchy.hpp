#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "l1ns/matrix.hpp"

namespace l1ns {

/// Identifies one reproducible variate stream. Identical (seed, stream_id)
/// always reproduces the identical sequence bit-for-bit: the engine is the
/// standard-specified mt19937_64 and the uniform mapping below is fixed
/// arithmetic, so nothing is implementation-defined.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  bool operator==(const RngSpec&) const = default;
};

/// Stream of uniforms on the open interval (0,1). Draws are (k + 1/2) / 2^53
/// for k in [0, 2^53), so 0 and 1 are excluded exactly and tan never sees an
/// endpoint.
class UniformStream {
 public:
  explicit UniformStream(const RngSpec& spec);

  double next_open01();
  std::uint64_t next_u64() { return engine_(); }
  /// Standard normal via Box-Muller on two open-interval uniforms; the
  /// second variate of each pair is cached.
  double next_gaussian();
  /// Uniform index in [0, bound).
  std::size_t next_index(std::size_t bound);

 private:
  std::mt19937_64 engine_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

/// Deterministic seed mixing (splitmix64 finalizer) used to derive
/// per-purpose seeds, e.g. one sweep seed per sketch dimension.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

/// Inverse CDF of the standard Cauchy: tan(pi (u - 1/2)). Strictly increasing,
/// quantile(1-u) = -quantile(u), exact 0 / +-1 at the quartiles. Throws
/// std::domain_error outside (0,1).
double cauchy_quantile(double u);

/// The d x D sketch with its RNG provenance.
struct SketchMatrix {
  DenseMatrix p;  // d x D
  RngSpec rng;
  std::size_t d = 0;
  std::size_t ambient_dim = 0;
};

/// Fills a d x D matrix with i.i.d. standard Cauchy variates drawn row-major
/// from the stream. Requires 1 <= d < D (the embedding must reduce dimension).
SketchMatrix sample_sketch(const RngSpec& rng, std::size_t d, std::size_t ambient_dim);

/// Empirical 1-stability probe: samples a fresh d x len(x) sketch from rng and
/// returns median_j |(P x)_j| / ||x||_1. For standard Cauchy entries each
/// (P x)_j is distributed as ||x||_1 times a standard Cauchy, so the statistic
/// concentrates near 1. Requires a nonzero x and d >= 1000.
double stability_check(const std::vector<double>& x, std::size_t d, const RngSpec& rng);

}  // namespace l1ns
