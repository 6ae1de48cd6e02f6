#include "l1ns/reference.hpp"

namespace l1ns {

std::vector<double> matvec_reference(const DenseMatrix& m, const std::vector<double>& x) {
  if (x.size() != m.cols) {
    throw std::invalid_argument("matvec_reference: matrix " + m.shape_string() +
                                " incompatible with vector of length " + std::to_string(x.size()));
  }
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) y[i] += m.at(i, j) * x[j];
  return y;
}

DenseMatrix matmul_reference(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) {
    throw std::invalid_argument("matmul_reference: " + a.shape_string() + " times " +
                                b.shape_string());
  }
  DenseMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j)
      for (std::size_t k = 0; k < a.cols; ++k) c.at(i, j) += a.at(i, k) * b.at(k, j);
  return c;
}

}  // namespace l1ns
