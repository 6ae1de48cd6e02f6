#include "l1ns/matrix.hpp"

#include <cmath>

namespace l1ns {

DenseMatrix identity_matrix(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

void require_finite(const DenseMatrix& m, const std::string& what) {
  for (double v : m.data) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(what + ": non-finite entry in " + m.shape_string() + " matrix");
    }
  }
}

void require_finite(const std::vector<double>& v, const std::string& what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(what + ": non-finite vector entry");
    }
  }
}

double norm1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace l1ns
