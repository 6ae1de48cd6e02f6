#pragma once

#include <vector>

#include "l1ns/matrix.hpp"

namespace l1ns {

// Naive single-threaded reference kernels. Kept as the independent oracle for
// the OpenMP kernels and as the baseline side of the benchmark; not used on
// any production path.

std::vector<double> matvec_reference(const DenseMatrix& m, const std::vector<double>& x);

DenseMatrix matmul_reference(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace l1ns
