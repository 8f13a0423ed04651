#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "etc/errors.hpp"
#include "etc/linalg.hpp"
#include "oracles.hpp"

using namespace etc;
using namespace etc::linalg;

TEST_CASE("matrix basics") {
  const Matrix a{{1, 2}, {3, 4}};
  CHECK(a.transpose() == Matrix{{1, 3}, {2, 4}});
  CHECK(a * Matrix::identity(2) == a);
  CHECK(a.trace() == 5.0);
  const Vector v = a * Vector{1, -1};
  CHECK(v == Vector{-1, -1});
  CHECK(hstack(a, Matrix(2, 0)) == a);
  CHECK(vstack(a, a).rows() == 4);
  CHECK_THROWS_AS(a * Matrix(3, 3), DimensionError);
  CHECK_THROWS_AS(hstack(a, Matrix(3, 1)), DimensionError);
  CHECK(a.block(1, 0, 1, 2) == Matrix{{3, 4}});
}

TEST_CASE("sym_eigen against characteristic polynomial roots") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const Matrix m = oracle::random_symmetric(rng, n, -3.0, 3.0);
    const Vector got = sym_eigenvalues(m);
    std::vector<double> ref = oracle::sym_eigenvalues(oracle::dense(m));
    std::sort(ref.begin(), ref.end());
    REQUIRE(ref.size() == n);
    for (std::size_t k = 0; k < n; ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-9).scale(3.0));
  }
}

TEST_CASE("sym_eigen vectors are orthonormal eigenpairs") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const Matrix m = oracle::random_symmetric(rng, n);
    const SymEigen es = sym_eigen(m);
    const Matrix vtv = es.vectors.transpose() * es.vectors;
    CHECK((vtv - Matrix::identity(n)).max_abs() < 1e-12);
    const Matrix resid = m * es.vectors - es.vectors * Matrix::diagonal(es.values);
    CHECK(resid.max_abs() < 1e-10);
    CHECK(std::is_sorted(es.values.begin(), es.values.end()));
  }
}

TEST_CASE("property: eigenvalue sum equals the trace") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const double mag = std::pow(10.0, static_cast<double>(trial % 7) - 3.0);
    const Matrix m = oracle::random_symmetric(rng, n, -mag, mag);
    const Vector ev = sym_eigenvalues(m);
    double sum = 0.0;
    for (double v : ev) sum += v;
    CHECK(std::abs(sum - m.trace()) <= 1e-9 * std::max(1.0, m.max_abs() * static_cast<double>(n)));
  }
}

TEST_CASE("sym_eigen rejects asymmetric and non-square input") {
  CHECK_THROWS_AS(sym_eigen(Matrix{{1, 2}, {0, 1}}), DomainError);
  CHECK_THROWS_AS(sym_eigen(Matrix(2, 3)), DimensionError);
}

TEST_CASE("spectral_norm against power iteration") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t r = 1 + trial % 4;
    const std::size_t c = 1 + (trial / 4) % 4;
    const Matrix m = oracle::random_matrix(rng, r, c, -2.0, 2.0);
    CHECK(spectral_norm(m) == doctest::Approx(oracle::power_norm(m)).epsilon(1e-9));
  }
  CHECK(spectral_norm(Matrix{{0, 0}, {1, -4}}) == doctest::Approx(std::sqrt(17.0)).epsilon(1e-12));
  CHECK(spectral_norm(Matrix(2, 2)) == 0.0);
}

TEST_CASE("property: spectral_norm is transpose invariant") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = oracle::random_matrix(rng, 1 + trial % 5, 1 + (trial / 5) % 5, -5.0, 5.0);
    CHECK(std::abs(spectral_norm(m) - spectral_norm(m.transpose())) <= 1e-12 * std::max(1.0, spectral_norm(m)));
  }
}

TEST_CASE("is_positive_definite") {
  CHECK(is_positive_definite(Matrix::identity(3)));
  CHECK_FALSE(is_positive_definite(Matrix{{1, 2}, {2, 1}}));
  CHECK_THROWS(is_positive_definite(Matrix{{1, 2}, {0, 1}}));
}

TEST_CASE("property: is_positive_definite agrees with leading minors") {
  std::mt19937_64 rng(16);
  int positives = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + trial % 2;
    Matrix m = oracle::random_symmetric(rng, n, -1.0, 1.0);
    m += 0.6 * Matrix::identity(n);
    const bool ref = oracle::leading_minors_positive(m);
    positives += ref;
    CHECK(is_positive_definite(m) == ref);
  }
  // both outcomes are exercised
  CHECK(positives > 20);
  CHECK(positives < 380);
}

TEST_CASE("solve_linear") {
  const Vector x = solve_linear(Matrix{{2, 1}, {1, 3}}, Vector{3, 5});
  CHECK(x[0] == doctest::Approx(0.8));
  CHECK(x[1] == doctest::Approx(1.4));
  CHECK_THROWS_AS(solve_linear(Matrix{{1, 2}, {2, 4}}, Vector{1, 1}), DomainError);
  CHECK_THROWS_AS(solve_linear(Matrix{{1, 2}, {2, 4}}, Vector{1}), DimensionError);
}

TEST_CASE("is_hurwitz") {
  CHECK(is_hurwitz(Matrix{{0, 1}, {-1, -1}}));
  CHECK_FALSE(is_hurwitz(Matrix{{0, 1}, {-2, 3}}));
  CHECK_FALSE(is_hurwitz(Matrix{{0, 1}, {-1, 0}}));  // marginal
  CHECK_FALSE(is_hurwitz(Matrix{{-1, 0}, {0, 0}}));
}

TEST_CASE("property: is_hurwitz agrees with the 2x2 trace/determinant test") {
  std::mt19937_64 rng(17);
  int stable = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Matrix a = oracle::random_matrix(rng, 2, 2, -2.0, 2.0);
    const double tr = a.trace();
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (std::abs(tr) < 1e-3 || std::abs(det) < 1e-3) continue;  // too close to the boundary
    const bool ref = tr < 0.0 && det > 0.0;
    stable += ref;
    CHECK(is_hurwitz(a) == ref);
  }
  CHECK(stable > 50);
}

TEST_CASE("solve_lyapunov analytic case") {
  const Matrix P = solve_lyapunov(-1.0 * Matrix::identity(2), Matrix::identity(2));
  CHECK((P - 0.5 * Matrix::identity(2)).max_abs() < 1e-14);
}

TEST_CASE("solve_lyapunov against the Kronecker oracle") {
  const Matrix a{{0, 1}, {-1, -1}};
  const Matrix q = Matrix::identity(2);
  const Matrix P = solve_lyapunov(a, q);
  const Matrix ref = oracle::lyapunov_kron(a, q);
  CHECK((P - ref).max_abs() <= 1e-9 * std::max(1.0, ref.max_abs()));
  // hand solution: P = [[1.5, 0.5], [0.5, 1]]
  CHECK((P - Matrix{{1.5, 0.5}, {0.5, 1.0}}).max_abs() < 1e-12);
}

TEST_CASE("property: random stable systems") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const Matrix a = oracle::random_stable(rng, n);
    Matrix q = oracle::random_matrix(rng, n, n);
    q = q * q.transpose() + 0.1 * Matrix::identity(n);
    const Matrix P = solve_lyapunov(a, q);
    const Matrix ref = oracle::lyapunov_kron(a, q);
    CHECK((P - ref).max_abs() <= 1e-9 * std::max(1.0, ref.max_abs()));
    CHECK(asymmetry(P) <= 1e-10);
    const Matrix resid = a.transpose() * P + P * a + q;
    CHECK(spectral_norm(0.5 * (resid + resid.transpose())) <= 1e-8 * spectral_norm(q));
    CHECK(is_positive_definite(P));
  }
}

TEST_CASE("solve_lyapunov errors") {
  CHECK_THROWS_AS(solve_lyapunov(Matrix{{0, 1}, {-2, 3}}, Matrix::identity(2)), DomainError);
  CHECK_THROWS_AS(solve_lyapunov(-1.0 * Matrix::identity(2), Matrix::identity(3)), DimensionError);
  CHECK_THROWS_AS(solve_lyapunov(Matrix(2, 3), Matrix::identity(2)), DimensionError);
}
