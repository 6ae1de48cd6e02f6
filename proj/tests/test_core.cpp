#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "l1ns/cauchy.hpp"
#include "l1ns/io.hpp"
#include "l1ns/kernels.hpp"
#include "l1ns/linalg.hpp"
#include "l1ns/models.hpp"
#include "l1ns/reference.hpp"

using namespace l1ns;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  UniformStream stream(RngSpec{seed, 0});
  DenseMatrix m(rows, cols);
  for (double& v : m.data) v = stream.next_gaussian();
  return m;
}

std::vector<double> random_vector(std::size_t len, std::uint64_t seed) {
  UniformStream stream(RngSpec{seed, 1});
  std::vector<double> v(len);
  for (double& x : v) x = stream.next_gaussian();
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("matvec identity and zero matrices") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK(matvec(identity_matrix(3), x) == x);

  const DenseMatrix zeros(2, 3);
  const std::vector<double> y = matvec(zeros, {5.0, 5.0, 5.0});
  CHECK(y == std::vector<double>{0.0, 0.0});
}

TEST_CASE("matvec hand example") {
  // [[1,2],[3,4]] * (1,1) = (3,7), cross-checked against the naive loop.
  const DenseMatrix m(2, 2, {1.0, 2.0, 3.0, 4.0});
  const std::vector<double> x{1.0, 1.0};
  CHECK(matvec(m, x) == std::vector<double>{3.0, 7.0});
  CHECK(matvec_reference(m, x) == std::vector<double>{3.0, 7.0});
}

TEST_CASE("matvec dimension mismatch carries both shapes") {
  const DenseMatrix m(2, 3);
  CHECK_THROWS_WITH_AS(matvec(m, {1.0, 2.0}), doctest::Contains("2x3"), std::invalid_argument);
}

TEST_CASE("matvec agrees with naive reference on random inputs up to 200x200") {
  for (const std::size_t size : {7u, 33u, 200u}) {
    const DenseMatrix m = random_matrix(size, size, 100 + size);
    const std::vector<double> x = random_vector(size, 200 + size);
    const std::vector<double> fast = matvec(m, x);
    const std::vector<double> slow = matvec_reference(m, x);
    double scale = 0.0;
    for (double v : slow) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(fast, slow) <= 1e-12 * std::max(scale, 1.0));
  }
}

TEST_CASE("matmul agrees with naive reference") {
  const DenseMatrix a = random_matrix(17, 23, 5);
  const DenseMatrix b = random_matrix(23, 9, 6);
  const DenseMatrix fast = matmul(a, b);
  const DenseMatrix slow = matmul_reference(a, b);
  double scale = 0.0;
  for (double v : slow.data) scale = std::max(scale, std::abs(v));
  double diff = 0.0;
  for (std::size_t i = 0; i < fast.data.size(); ++i) {
    diff = std::max(diff, std::abs(fast.data[i] - slow.data[i]));
  }
  CHECK(diff <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("gram_weighted matches explicit triple product") {
  const DenseMatrix a = random_matrix(31, 4, 7);
  std::vector<double> w = random_vector(31, 8);
  for (double& x : w) x = std::abs(x) + 0.1;
  const DenseMatrix h = gram_weighted(a, w);
  for (std::size_t p = 0; p < 4; ++p) {
    for (std::size_t q = 0; q < 4; ++q) {
      double expect = 0.0;
      for (std::size_t i = 0; i < 31; ++i) expect += a.at(i, p) * w[i] * a.at(i, q);
      CHECK(h.at(p, q) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("orthonormalize keeps already-orthonormal columns") {
  DenseMatrix b(4, 2);
  b.at(0, 0) = 1.0;
  b.at(2, 1) = 1.0;
  const DenseMatrix q = orthonormalize(b);
  for (std::size_t i = 0; i < b.data.size(); ++i) {
    CHECK(std::abs(q.data[i] - b.data[i]) <= 1e-12);
  }
}

TEST_CASE("orthonormalize normalizes a single scaled column") {
  const DenseMatrix b(2, 1, {2.0, 0.0});
  const DenseMatrix q = orthonormalize(b);
  CHECK(q.at(0, 0) == doctest::Approx(1.0));
  CHECK(q.at(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("orthonormalize random 10x3: Gram identity and span preserved") {
  const DenseMatrix b = random_matrix(10, 3, 42);
  const DenseMatrix q = orthonormalize(b);
  CHECK(gram_identity_defect(q) <= 1e-10);
  // Span oracle: each original column projects onto the output basis with
  // negligible residual.
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(projection_residual(q, b.column(j)) <= 1e-8);
  }
}

TEST_CASE("orthonormalize names the deficient column") {
  DenseMatrix b(3, 2);
  b.at(0, 0) = 1.0;
  b.at(0, 1) = 2.0;  // parallel to column 0
  CHECK_THROWS_WITH_AS(orthonormalize(b), doctest::Contains("column 1"), std::invalid_argument);
}

TEST_CASE("span_basis caps rank instead of throwing") {
  DenseMatrix b(3, 3);
  b.at(0, 0) = 1.0;
  b.at(0, 1) = 2.0;
  b.at(1, 2) = 1.0;
  const DenseMatrix q = span_basis(b);
  CHECK(q.cols == 2);
  CHECK(gram_identity_defect(q) <= 1e-12);
}

TEST_CASE("jacobi_eigh recovers a known spectrum") {
  // A = V diag(5, 2, 1) V^T for an orthonormal V built from a random matrix.
  const DenseMatrix v = orthonormalize(random_matrix(3, 3, 11));
  const std::vector<double> lambda{5.0, 2.0, 1.0};
  DenseMatrix a(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) a.at(i, j) += v.at(i, k) * lambda[k] * v.at(j, k);
  const SymmetricEig eig = jacobi_eigh(a);
  CHECK(eig.values[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(eig.values[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eig.values[2] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 0; k < 3; ++k) {
    // Eigenvector defined up to sign: compare |cosine| to 1.
    double cos = 0.0;
    for (std::size_t i = 0; i < 3; ++i) cos += eig.vectors.at(i, k) * v.at(i, k);
    CHECK(std::abs(cos) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("cholesky_solve_spd solves a small SPD system") {
  const DenseMatrix b = random_matrix(8, 3, 13);
  const DenseMatrix h = gram_weighted(b, std::vector<double>(8, 1.0));
  const std::vector<double> x_true{1.5, -2.0, 0.25};
  const std::vector<double> rhs = matvec(h, x_true);
  const std::vector<double> x = cholesky_solve_spd(h, rhs);
  CHECK(max_abs_diff(x, x_true) <= 1e-10);
}

TEST_CASE("fit_subspace on multiples of one vector") {
  DenseMatrix samples(4, 3);
  const std::vector<double> base{1.0, -2.0, 0.5, 3.0};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 4; ++i) samples.at(i, j) = base[i] * static_cast<double>(j + 1);
  }
  const SubspaceModel model = fit_subspace(samples, 1);
  CHECK(projection_residual(model.basis, base) <= 1e-10 * norm2(base));
}

TEST_CASE("fit_subspace identity columns spans R^3 exactly") {
  // Embed the R^3 identity samples in R^4 so rank < ambient dimension holds.
  DenseMatrix samples(4, 3);
  for (std::size_t j = 0; j < 3; ++j) samples.at(j, j) = 1.0;
  const SubspaceModel model = fit_subspace(samples, 3);
  CHECK(gram_identity_defect(model.basis) <= 1e-12);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(projection_residual(model.basis, samples.column(j)) <= 1e-10);
  }
}

TEST_CASE("fit_subspace rank-2 samples with tiny noise: reconstruction oracle") {
  // Random rank-2 data in R^8 plus 1e-9 perturbation.
  const DenseMatrix basis = orthonormalize(random_matrix(8, 2, 17));
  UniformStream stream(RngSpec{18, 0});
  DenseMatrix samples(8, 6);
  for (std::size_t j = 0; j < 6; ++j) {
    const std::vector<double> c{stream.next_gaussian(), stream.next_gaussian()};
    std::vector<double> col = matvec(basis, c);
    for (double& x : col) x += 1e-9 * stream.next_gaussian();
    samples.set_column(j, col);
  }
  const SubspaceModel model = fit_subspace(samples, 2);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(projection_residual(model.basis, samples.column(j)) <= 1e-6);
  }
}

TEST_CASE("fit_subspace errors: too few samples, rank deficient") {
  const DenseMatrix thin = random_matrix(6, 2, 19);
  CHECK_THROWS_AS(fit_subspace(thin, 3), std::invalid_argument);

  DenseMatrix flat(5, 3);
  const std::vector<double> base{1.0, 1.0, 1.0, 1.0, 1.0};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 5; ++i) flat.at(i, j) = base[i] * static_cast<double>(j + 1);
  }
  CHECK_THROWS_AS(fit_subspace(flat, 2), std::invalid_argument);
}

TEST_CASE("fit_subspace span is invariant under sample column permutation") {
  const DenseMatrix samples = random_matrix(9, 5, 23);
  DenseMatrix permuted(9, 5);
  const std::size_t perm[5] = {3, 0, 4, 1, 2};
  for (std::size_t j = 0; j < 5; ++j) permuted.set_column(j, samples.column(perm[j]));
  const SubspaceModel a = fit_subspace(samples, 3);
  const SubspaceModel b = fit_subspace(permuted, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(projection_residual(b.basis, a.basis.column(j)) <= 1e-8);
  }
}

TEST_CASE("SubspaceModel validates orthonormality and shape") {
  CHECK_THROWS_AS(SubspaceModel(0, DenseMatrix(3, 1, {1.0, 1.0, 0.0})), std::invalid_argument);
  CHECK_THROWS_AS(SubspaceModel(0, identity_matrix(3)), std::invalid_argument);  // r == D
  CHECK_NOTHROW(SubspaceModel(0, DenseMatrix(3, 1, {1.0, 0.0, 0.0})));
}

TEST_CASE("SubspaceCollection validates ids and shapes") {
  auto make_model = [](int id, std::size_t which) {
    DenseMatrix b(4, 1);
    b.at(which, 0) = 1.0;
    return SubspaceModel(id, b);
  };
  CHECK_NOTHROW(SubspaceCollection({make_model(0, 0), make_model(1, 1)}));
  CHECK_THROWS_AS(SubspaceCollection({make_model(0, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(SubspaceCollection({make_model(0, 0), make_model(2, 1)}),
                  std::invalid_argument);
}

TEST_CASE("matrix csv round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "l1ns_core_test";
  std::filesystem::create_directories(dir);
  const DenseMatrix m = random_matrix(5, 7, 29);
  const auto path = dir / "m.csv";
  write_matrix_csv(path, m);
  const DenseMatrix back = read_matrix_csv(path);
  CHECK(back == m);  // 17 significant digits round-trip doubles exactly
  std::filesystem::remove_all(dir);
}

TEST_CASE("matrix binary round-trip and sniffing") {
  const auto dir = std::filesystem::temp_directory_path() / "l1ns_core_test_bin";
  std::filesystem::create_directories(dir);
  const DenseMatrix m = random_matrix(6, 4, 31);
  const auto path = dir / "m.bin";
  write_matrix_binary(path, m);
  CHECK(read_matrix_binary(path) == m);
  CHECK(read_matrix_any(path) == m);

  const auto csv_path = dir / "m.csv";
  write_matrix_csv(csv_path, m);
  CHECK(read_matrix_any(csv_path) == m);

  CHECK_THROWS_AS(read_matrix_binary(dir / "missing.bin"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("atomic_write leaves no temp file on failure") {
  const auto dir = std::filesystem::temp_directory_path() / "l1ns_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.bin";
  CHECK_THROWS_AS(atomic_write(path,
                               [](const std::filesystem::path&) {
                                 throw std::runtime_error("simulated failure");
                               }),
                  std::runtime_error);
  CHECK_FALSE(std::filesystem::exists(path));
  CHECK(std::filesystem::is_empty(dir));
  std::filesystem::remove_all(dir);
}
