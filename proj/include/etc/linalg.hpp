#pragma once

#include "etc/matrix.hpp"

namespace etc::linalg {

inline constexpr double kDefaultTol = 1e-9;

struct SymEigen {
  Vector values;   // nondecreasing
  Matrix vectors;  // column k is the eigenvector of values[k]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Throws DimensionError for non-square input and DomainError when the
/// asymmetry exceeds tol * max(1, max|m_ij|).
SymEigen sym_eigen(const Matrix& m, double tol = kDefaultTol);

/// Eigenvalues of a symmetric matrix in nondecreasing order.
Vector sym_eigenvalues(const Matrix& m, double tol = kDefaultTol);

/// |m| = sqrt(lambda_max(m^T m)); 0 for an empty matrix.
double spectral_norm(const Matrix& m);

/// True iff every eigenvalue of the symmetric matrix m exceeds tol.
bool is_positive_definite(const Matrix& m, double tol = kDefaultTol);

/// Solves a x = b by LU with partial pivoting. DomainError if a is
/// numerically singular.
Vector solve_linear(Matrix a, Vector b);

/// A is Hurwitz with the given stability margin, i.e. every eigenvalue has
/// real part < -margin. Decided by the Lyapunov theorem on A + margin*I: the
/// equation (A+mI)^T P + P (A+mI) = -I has a positive definite solution iff
/// A + mI is Hurwitz.
bool is_hurwitz(const Matrix& a, double margin = kDefaultTol);

/// Symmetric P with a^T P + P a = -q. Requires a Hurwitz (DomainError
/// otherwise) and q symmetric of the same size (DimensionError / DomainError).
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

}  // namespace etc::linalg
