#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1ns {

/// Dense row-major matrix of doubles. The only matrix type in the library;
/// all entries are required to be finite.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  DenseMatrix() = default;

  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  DenseMatrix(std::size_t r, std::size_t c, std::vector<double> entries)
      : rows(r), cols(c), data(std::move(entries)) {
    if (data.size() != rows * cols) {
      throw std::invalid_argument("DenseMatrix: entry count " + std::to_string(data.size()) +
                                  " does not match shape " + shape_string());
    }
  }

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  const double* row(std::size_t i) const { return data.data() + i * cols; }
  double* row(std::size_t i) { return data.data() + i * cols; }

  std::string shape_string() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }

  bool operator==(const DenseMatrix& other) const = default;

  /// Column j as a new vector.
  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(rows);
    for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
    return out;
  }

  void set_column(std::size_t j, const std::vector<double>& v) {
    if (v.size() != rows) {
      throw std::invalid_argument("set_column: length " + std::to_string(v.size()) +
                                  " vs " + std::to_string(rows) + " rows");
    }
    for (std::size_t i = 0; i < rows; ++i) at(i, j) = v[i];
  }
};

DenseMatrix identity_matrix(std::size_t n);

/// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, const std::string& what);
void require_finite(const std::vector<double>& v, const std::string& what);

// Small vector helpers shared across modules.
double norm1(const std::vector<double>& v);
double norm2(const std::vector<double>& v);
double norm_inf(const std::vector<double>& v);
double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace l1ns
