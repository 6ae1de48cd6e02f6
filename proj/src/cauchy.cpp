#include "l1ns/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace l1ns {

UniformStream::UniformStream(const RngSpec& spec) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(spec.seed & 0xffffffffu),
      static_cast<std::uint32_t>(spec.seed >> 32),
      static_cast<std::uint32_t>(spec.stream_id & 0xffffffffu),
      static_cast<std::uint32_t>(spec.stream_id >> 32),
  };
  engine_.seed(seq);
}

double UniformStream::next_open01() {
  const std::uint64_t bits = engine_() >> 11;  // top 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double UniformStream::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  const double u1 = next_open01();
  const double u2 = next_open01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_gaussian_ = radius * std::sin(angle);
  has_cached_gaussian_ = true;
  return radius * std::cos(angle);
}

std::size_t UniformStream::next_index(std::size_t bound) {
  // Modulo bias is ~bound/2^64, irrelevant at these sizes; determinism is
  // what matters here.
  return static_cast<std::size_t>(engine_() % bound);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t x = base + 0x9E3779B97F4A7C15ull * (salt + 0x632BE59BD9B4E019ull);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double cauchy_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("cauchy_quantile: u = " + std::to_string(u) + " outside (0,1)");
  }
  const double t = u - 0.5;
  // Quartiles of the density 1/[pi (1+x^2)] are exactly -1, 0, 1; t is exact
  // at these points since both u and 0.5 are representable.
  if (t == 0.0) return 0.0;
  if (t == 0.25) return 1.0;
  if (t == -0.25) return -1.0;
  return std::tan(M_PI * t);
}

SketchMatrix sample_sketch(const RngSpec& rng, std::size_t d, std::size_t ambient_dim) {
  if (d == 0) throw std::invalid_argument("sample_sketch: d must be positive");
  if (d >= ambient_dim) {
    throw std::invalid_argument("sample_sketch: d = " + std::to_string(d) +
                                " must be below the ambient dimension " +
                                std::to_string(ambient_dim));
  }
  SketchMatrix sk;
  sk.rng = rng;
  sk.d = d;
  sk.ambient_dim = ambient_dim;
  sk.p = DenseMatrix(d, ambient_dim);
  UniformStream stream(rng);
  for (double& v : sk.p.data) v = cauchy_quantile(stream.next_open01());
  return sk;
}

double stability_check(const std::vector<double>& x, std::size_t d, const RngSpec& rng) {
  if (d < 1000) {
    throw std::invalid_argument("stability_check: d = " + std::to_string(d) +
                                " too small for a stable median (need >= 1000)");
  }
  const double scale = norm1(x);
  if (scale == 0.0) throw std::invalid_argument("stability_check: zero vector");

  // Sample the sketch entries directly; x may have any length >= 1 and the
  // d < D restriction of sample_sketch does not apply here.
  UniformStream stream(rng);
  std::vector<double> mags(d);
  std::vector<double> row(x.size());
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += cauchy_quantile(stream.next_open01()) * x[i];
    }
    mags[j] = std::abs(acc);
  }
  std::nth_element(mags.begin(), mags.begin() + d / 2, mags.end());
  double median = mags[d / 2];
  if (d % 2 == 0) {
    const double below = *std::max_element(mags.begin(), mags.begin() + d / 2);
    median = (below + median) / 2.0;
  }
  return median / scale;
}

}  // namespace l1ns
