#include "etc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "etc/errors.hpp"

namespace etc::linalg {
namespace {

constexpr int kMaxSweeps = 100;

void require_symmetric(const Matrix& m, double tol, const char* who) {
  if (!m.is_square()) throw DimensionError(std::string(who) + ": matrix is " + shape_string(m) + ", expected square");
  const double scale = std::max(1.0, m.max_abs());
  if (asymmetry(m) > tol * scale) throw DomainError(std::string(who) + ": matrix is not symmetric");
}

// Unknowns of a symmetric n x n matrix, upper triangle packed row by row.
std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + j;
}

// a^T P + P a = -q over the n(n+1)/2 independent entries of P. Returns
// nullopt when the operator is singular (some pair of eigenvalues of a sums
// to zero).
std::optional<Matrix> solve_lyapunov_packed(const Matrix& a, const Matrix& q) {
  const std::size_t n = a.rows();
  const std::size_t m = n * (n + 1) / 2;
  Matrix op(m, m);
  Vector rhs(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t row = packed_index(i, j, n);
      // (a^T P)_ij = sum_k a_ki P_kj ; (P a)_ij = sum_k P_ik a_kj
      for (std::size_t k = 0; k < n; ++k) {
        op(row, packed_index(k, j, n)) += a(k, i);
        op(row, packed_index(i, k, n)) += a(k, j);
      }
      rhs[row] = -0.5 * (q(i, j) + q(j, i));
    }
  }
  Vector p;
  try {
    p = solve_linear(op, rhs);
    // one step of iterative refinement
    Vector r = op * p;
    for (std::size_t k = 0; k < m; ++k) r[k] = rhs[k] - r[k];
    const Vector dp = solve_linear(op, r);
    for (std::size_t k = 0; k < m; ++k) p[k] += dp[k];
  } catch (const DomainError&) {
    return std::nullopt;
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = p[packed_index(i, j, n)];
  if (!out.all_finite()) return std::nullopt;
  return out;
}

}  // namespace

SymEigen sym_eigen(const Matrix& m, double tol) {
  require_symmetric(m, tol, "sym_eigen");
  const std::size_t n = m.rows();
  Matrix a = m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
  Matrix v = Matrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing a(p,q); t = tan(phi) chosen as the smaller root.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

Vector sym_eigenvalues(const Matrix& m, double tol) { return sym_eigen(m, tol).values; }

double spectral_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  if (!m.all_finite()) throw DomainError("spectral_norm: non-finite entry");
  // Use the smaller Gram matrix; both share the nonzero spectrum.
  const Matrix gram = m.rows() < m.cols() ? m * m.transpose() : m.transpose() * m;
  const Vector ev = sym_eigenvalues(gram, 1e-6);
  return std::sqrt(std::max(0.0, ev.back()));
}

bool is_positive_definite(const Matrix& m, double tol) {
  const Vector ev = sym_eigenvalues(m, std::max(tol, kDefaultTol));
  return ev.empty() || ev.front() > tol;
}

Vector solve_linear(Matrix a, Vector b) {
  const std::size_t n = a.rows();
  if (!a.is_square() || b.size() != n) throw DimensionError("solve_linear: " + shape_string(a) + " with rhs " + std::to_string(b.size()));
  const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= 1e-13 * scale) throw DomainError("solve_linear: singular matrix");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
    x[i] = s / a(i, i);
  }
  return x;
}

bool is_hurwitz(const Matrix& a, double margin) {
  if (!a.is_square()) throw DimensionError("is_hurwitz: matrix is " + shape_string(a));
  if (a.empty()) return true;
  if (!a.all_finite()) return false;
  const std::size_t n = a.rows();
  const Matrix shifted = a + margin * Matrix::identity(n);
  const auto p = solve_lyapunov_packed(shifted, Matrix::identity(n));
  if (!p) return false;
  return is_positive_definite(*p, 0.0);
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  if (!a.is_square()) throw DimensionError("solve_lyapunov: a is " + shape_string(a));
  if (q.rows() != a.rows() || q.cols() != a.cols())
    throw DimensionError("solve_lyapunov: q is " + shape_string(q) + ", a is " + shape_string(a));
  require_symmetric(q, kDefaultTol, "solve_lyapunov");
  if (!is_hurwitz(a, 0.0)) throw DomainError("solve_lyapunov: a is not Hurwitz, no solution");
  auto p = solve_lyapunov_packed(a, q);
  if (!p) throw DomainError("solve_lyapunov: singular Lyapunov operator");
  return *p;
}

}  // namespace etc::linalg
