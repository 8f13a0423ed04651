#pragma once

// Reference computations used only by the tests. They share no code with
// the library: plain nested vectors, textbook algorithms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "etc/matrix.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense dense(const etc::Matrix& m) {
  Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

inline etc::Matrix matrix(const Dense& d) { return etc::Matrix::from_rows(d); }

inline Dense mul(const Dense& a, const Dense& b) {
  Dense c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Dense transpose(const Dense& a) {
  Dense t(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

// Gaussian elimination with complete pivoting.
inline std::vector<double> solve(Dense a, std::vector<double> b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k, pc = k;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (std::abs(a[i][j]) > std::abs(a[pr][pc])) {
          pr = i;
          pc = j;
        }
    if (a[pr][pc] == 0.0) throw std::runtime_error("oracle::solve: singular");
    std::swap(a[k], a[pr]);
    std::swap(b[k], b[pr]);
    for (auto& row : a) std::swap(row[k], row[pc]);
    std::swap(col[k], col[pc]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> y(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * y[j];
    y[i] = s / a[i][i];
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[col[i]] = y[i];
  return x;
}

inline double det(Dense a) {
  const std::size_t n = a.size();
  double d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (a[p][k] == 0.0) return 0.0;
    if (p != k) {
      std::swap(a[p], a[k]);
      d = -d;
    }
    d *= a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return d;
}

// Sylvester's criterion.
inline bool leading_minors_positive(const etc::Matrix& m) {
  const Dense d = dense(m);
  for (std::size_t k = 1; k <= d.size(); ++k) {
    Dense sub(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub[i][j] = d[i][j];
    if (!(det(sub) > 0.0)) return false;
  }
  return true;
}

// Characteristic polynomial coefficients c_0..c_n of det(sI - A) (c_n = 1) by
// Faddeev-LeVerrier.
inline std::vector<double> char_poly(const Dense& a) {
  const std::size_t n = a.size();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Dense m(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 1; k <= n; ++k) {
    Dense am = mul(a, m);
    for (std::size_t i = 0; i < n; ++i) am[i][i] += c[n - k + 1];
    m = am;
    Dense amk = mul(a, m);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += amk[i][i];
    c[n - k] = -tr / static_cast<double>(k);
  }
  return c;
}

inline double poly_eval(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * s + c[k];
  return v;
}

// Real roots of the characteristic polynomial of a symmetric matrix with
// distinct eigenvalues: sign-change scan over the Gershgorin interval, then
// bisection.
inline std::vector<double> sym_eigenvalues(const Dense& a, std::size_t scan = 200000) {
  const std::vector<double> c = char_poly(a);
  double r = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    r = std::max(r, s);
  }
  r += 1.0;
  std::vector<double> roots;
  double x0 = -r;
  double f0 = poly_eval(c, x0);
  for (std::size_t i = 1; i <= scan; ++i) {
    const double x1 = -r + 2.0 * r * static_cast<double>(i) / static_cast<double>(scan);
    const double f1 = poly_eval(c, x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = poly_eval(c, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

// Largest singular value by power iteration on A'A.
inline double power_norm(const etc::Matrix& m, int iters = 10000) {
  const Dense a = dense(m);
  const Dense ata = mul(transpose(a), a);
  std::vector<double> v(ata.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> w(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) w[i] += ata[i][j] * v[j];
    double n = 0.0;
    for (double x : w) n += x * x;
    n = std::sqrt(n);
    if (n == 0.0) return 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / n;
    lambda = n;
  }
  return std::sqrt(lambda);
}

// A'P + PA = -Q through the full n^2 Kronecker system
//   (I (x) A' + A' (x) I) vec(P) = -vec(Q)   (column-major vec).
inline etc::Matrix lyapunov_kron(const etc::Matrix& A, const etc::Matrix& Q) {
  const std::size_t n = A.rows();
  const std::size_t N = n * n;
  Dense K(N, std::vector<double>(N, 0.0));
  std::vector<double> rhs(N);
  auto idx = [n](std::size_t i, std::size_t j) { return j * n + i; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // (A'P)_ij = sum_k A_ki P_kj ; (PA)_ij = sum_k P_ik A_kj
      for (std::size_t k = 0; k < n; ++k) {
        K[idx(i, j)][idx(k, j)] += A(k, i);
        K[idx(i, j)][idx(i, k)] += A(k, j);
      }
      rhs[idx(i, j)] = -Q(i, j);
    }
  const std::vector<double> p = solve(K, rhs);
  etc::Matrix P(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) P(i, j) = p[idx(i, j)];
  return P;
}

// exp(A) by scaling and squaring with a degree-24 Taylor polynomial.
inline Dense expm(const Dense& a) {
  const std::size_t n = a.size();
  double nrm = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    nrm = std::max(nrm, s);
  }
  int squarings = 0;
  while (nrm > 0.25) {
    nrm *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  Dense as = a;
  for (auto& row : as)
    for (double& v : row) v *= scale;
  Dense result(n, std::vector<double>(n, 0.0));
  Dense term(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) result[i][i] = term[i][i] = 1.0;
  for (int k = 1; k <= 24; ++k) {
    term = mul(term, as);
    for (auto& row : term)
      for (double& v : row) v /= k;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = mul(result, result);
  return result;
}

inline std::vector<double> apply(const Dense& a, const std::vector<double>& v) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

// Closed-form time for zeta' = -2 L zeta - lambda (zeta^2 + 1) to go from
// 1/theta down to theta. With w = zeta + L/lambda, w' = -lambda (w^2 + s)
// where s = 1 - (L/lambda)^2.
inline double zeta_transit(double L, double lambda, double theta) {
  const double w0 = 1.0 / theta + L / lambda;
  const double w1 = theta + L / lambda;
  const double s = 1.0 - (L / lambda) * (L / lambda);
  if (std::abs(s) < 1e-14) return (1.0 / w1 - 1.0 / w0) / lambda;
  if (s > 0.0) {
    const double k = std::sqrt(s);
    return (std::atan(w0 / k) - std::atan(w1 / k)) / (lambda * k);
  }
  const double k = std::sqrt(-s);
  auto prim = [k](double w) { return std::log((w - k) / (w + k)) / (2.0 * k); };
  return (prim(w0) - prim(w1)) / lambda;
}

template <class Rng>
etc::Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  etc::Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

template <class Rng>
etc::Matrix random_symmetric(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  etc::Matrix m = random_matrix(rng, n, n, lo, hi);
  return 0.5 * (m + m.transpose());
}

// R - (|R|_F + margin) I has every eigenvalue real part <= -margin.
template <class Rng>
etc::Matrix random_stable(Rng& rng, std::size_t n, double margin = 0.1) {
  etc::Matrix r = random_matrix(rng, n, n, -2.0, 2.0);
  double fro = 0.0;
  for (double v : r.data()) fro += v * v;
  return r - (std::sqrt(fro) + margin) * etc::Matrix::identity(n);
}

}  // namespace oracle
