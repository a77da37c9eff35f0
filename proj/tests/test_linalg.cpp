#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "linalg.hpp"
#include "rng.hpp"

using namespace dsg;

TEST_CASE("dot, norm, axpy") {
  const Vector a{1, 2, 2};
  CHECK(dot(a, a) == 9.0);
  CHECK(norm(a) == 3.0);
  Vector y{1, 1, 1};
  axpy(2.0, a, y);
  CHECK(y == Vector{3, 5, 5});
}

TEST_CASE("matrix products and transpose") {
  Matrix a(2, 3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = static_cast<double>(i * 3 + j);
  const Matrix at = a.transposed();
  CHECK(at.rows() == 3);
  CHECK(at(2, 1) == a(1, 2));
  const Matrix g = a * at;
  CHECK(g(0, 0) == 5.0);
  CHECK(g(0, 1) == 14.0);
  CHECK(g(1, 1) == 50.0);
  const Vector v = a * std::span<const double>(Vector{1, 1, 1});
  CHECK(v == Vector{3, 12});
}

TEST_CASE("eigensolver: 2x2 closed form") {
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = a(1, 0) = 1;
  a(1, 1) = 2;
  const auto e = symmetric_eigen(a);
  CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigensolver: ring of 4 circulant") {
  Matrix w(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    w(i, i) = 1.0 / 3;
    w(i, (i + 1) % 4) = 1.0 / 3;
    w(i, (i + 3) % 4) = 1.0 / 3;
  }
  const auto e = symmetric_eigen(w);
  CHECK(std::abs(e.values[0] - 1.0) < 1e-10);
  CHECK(std::abs(e.values[1] - 1.0 / 3) < 1e-10);
  CHECK(std::abs(e.values[2] - 1.0 / 3) < 1e-10);
  CHECK(std::abs(e.values[3] + 1.0 / 3) < 1e-10);
}

TEST_CASE("eigensolver: J has a single unit eigenvalue") {
  const std::size_t n = 6;
  const Matrix j(n, n, 1.0 / n);
  const auto e = symmetric_eigen(j);
  CHECK(std::abs(e.values[0] - 1.0) < 1e-10);
  CHECK(std::abs(e.values[1]) < 1e-10);
  CHECK(std::abs(e.values[n - 1]) < 1e-10);
}

TEST_CASE("eigensolver: reconstruction of a random symmetric matrix") {
  Rng rng(5);
  const std::size_t n = 12;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.gaussian();
  const auto e = symmetric_eigen(a);
  Matrix rebuilt(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) rebuilt(i, j) += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(rebuilt(i, j) - a(i, j)));
  CHECK(err < 1e-10);
  for (std::size_t k = 1; k < n; ++k) CHECK(e.values[k - 1] >= e.values[k]);
}

TEST_CASE("solve_linear") {
  Matrix a(3, 3);
  a(0, 0) = 0;  // forces a pivot
  a(0, 1) = 2;
  a(0, 2) = 1;
  a(1, 0) = 1;
  a(1, 1) = 1;
  a(1, 2) = 0;
  a(2, 0) = 3;
  a(2, 1) = 0;
  a(2, 2) = 1;
  const Vector x{1, -2, 3};
  const Vector b = a * std::span<const double>(x);
  const Vector got = solve_linear(a, b);
  for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-12));
  CHECK_THROWS_AS(solve_linear(Matrix(2, 2, 1.0), Vector{1, 1}), Error);
}

TEST_CASE("rng is deterministic per seed and uniform lies in range") {
  Rng a(42), b(42), c(43);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform(1.0, 31.0);
    CHECK((u >= 1.0 && u < 31.0));
  }
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
}
