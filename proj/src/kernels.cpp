#include "l1ns/kernels.hpp"

#include <cstdint>

namespace l1ns {

namespace {

[[noreturn]] void shape_error(const char* op, const DenseMatrix& m, std::size_t vec_len) {
  throw std::invalid_argument(std::string(op) + ": matrix " + m.shape_string() +
                              " incompatible with vector of length " + std::to_string(vec_len));
}

}  // namespace

std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& x) {
  if (x.size() != m.cols) shape_error("matvec", m, x.size());
  std::vector<double> y(m.rows);
  const std::int64_t rows = static_cast<std::int64_t>(m.rows);
#pragma omp parallel for schedule(static) if (m.rows * m.cols > 16384)
  for (std::int64_t i = 0; i < rows; ++i) {
    const double* r = m.row(static_cast<std::size_t>(i));
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += r[j] * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

std::vector<double> matvec_transpose(const DenseMatrix& m, const std::vector<double>& x) {
  if (x.size() != m.rows) shape_error("matvec_transpose", m, x.size());
  // Column-parallel: each thread owns a contiguous slice of output columns and
  // walks the rows serially, so every output keeps a fixed accumulation order.
  std::vector<double> y(m.cols, 0.0);
  const std::int64_t cols = static_cast<std::int64_t>(m.cols);
#pragma omp parallel for schedule(static) if (m.rows * m.cols > 16384)
  for (std::int64_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) acc += m.at(i, static_cast<std::size_t>(j)) * x[i];
    y[static_cast<std::size_t>(j)] = acc;
  }
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) {
    throw std::invalid_argument("matmul: " + a.shape_string() + " times " + b.shape_string());
  }
  DenseMatrix c(a.rows, b.cols);
  const std::int64_t rows = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static) if (a.rows * a.cols * b.cols > 32768)
  for (std::int64_t i = 0; i < rows; ++i) {
    double* crow = c.row(static_cast<std::size_t>(i));
    const double* arow = a.row(static_cast<std::size_t>(i));
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

DenseMatrix gram_weighted(const DenseMatrix& a, const std::vector<double>& w) {
  if (w.size() != a.rows) shape_error("gram_weighted", a, w.size());
  const std::size_t r = a.cols;
  DenseMatrix h(r, r);
  // r is small everywhere this is used (subspace rank); keep the accumulation
  // serial over rows and fill the symmetric half.
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    const double wi = w[i];
    for (std::size_t p = 0; p < r; ++p) {
      const double wap = wi * arow[p];
      for (std::size_t q = p; q < r; ++q) h.at(p, q) += wap * arow[q];
    }
  }
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = 0; q < p; ++q) h.at(p, q) = h.at(q, p);
  return h;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
  return t;
}

}  // namespace l1ns
