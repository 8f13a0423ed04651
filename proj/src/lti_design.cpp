#include "etc/lti_design.hpp"

#include <cmath>
#include <limits>

#include "etc/errors.hpp"
#include "etc/linalg.hpp"

namespace etc {
namespace {

void expect_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols)
    throw DimensionError(std::string("assemble: ") + name + " is " + shape_string(m) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace

LtiController LtiController::static_gain(Matrix D) {
  LtiController c;
  c.D = std::move(D);
  return c;
}

double LmiCertificate::gamma() const { return std::sqrt(mu); }

ClosedLoopMatrices assemble(const LtiPlant& plant, const LtiController& ctrl) {
  const std::size_t np = plant.A.rows();
  if (!plant.A.is_square()) throw DimensionError("assemble: A_p is " + shape_string(plant.A) + ", expected square");
  const std::size_t nu = plant.B.cols();
  const std::size_t ny = plant.C.rows();
  expect_shape(plant.B, np, nu, "B_p");
  expect_shape(plant.C, ny, np, "C_p");
  expect_shape(ctrl.D, nu, ny, "D_c");

  const Matrix& Ap = plant.A;
  const Matrix& Bp = plant.B;
  const Matrix& Cp = plant.C;
  const Matrix& Dc = ctrl.D;
  const Matrix Acl = Ap + Bp * Dc * Cp;

  ClosedLoopMatrices clm;
  if (ctrl.is_static()) {
    if (ctrl.B.rows() != 0 || ctrl.C.cols() != 0)
      throw DimensionError("assemble: static controller must have empty B_c and C_c");
    clm.A1 = Acl;
    clm.B1 = Bp * Dc;
    clm.A2 = -(Cp * Acl);
    clm.B2 = -(Cp * Bp * Dc);
    clm.Cbar = Cp;
    return clm;
  }

  const std::size_t nc = ctrl.A.rows();
  expect_shape(ctrl.A, nc, nc, "A_c");
  expect_shape(ctrl.B, nc, ny, "B_c");
  expect_shape(ctrl.C, nu, nc, "C_c");
  const Matrix& Ac = ctrl.A;
  const Matrix& Bc = ctrl.B;
  const Matrix& Cc = ctrl.C;
  const std::size_t nx = np + nc;
  const std::size_t ne = ny + nu;

  clm.A1 = Matrix(nx, nx);
  clm.A1.set_block(0, 0, Acl);
  clm.A1.set_block(0, np, Bp * Cc);
  clm.A1.set_block(np, 0, Bc * Cp);
  clm.A1.set_block(np, np, Ac);

  clm.B1 = Matrix(nx, ne);
  clm.B1.set_block(0, 0, Bp * Dc);
  clm.B1.set_block(0, ny, Bp);
  clm.B1.set_block(np, 0, Bc);

  clm.A2 = Matrix(ne, nx);
  clm.A2.set_block(0, 0, -(Cp * Acl));
  clm.A2.set_block(0, np, -(Cp * Bp * Cc));
  clm.A2.set_block(ny, 0, -(Cc * Bc * Cp));
  clm.A2.set_block(ny, np, -(Cc * Ac));

  clm.B2 = Matrix(ne, ne);
  clm.B2.set_block(0, 0, -(Cp * Bp * Dc));
  clm.B2.set_block(0, ny, -(Cp * Bp));
  clm.B2.set_block(ny, 0, -(Cc * Bc));

  clm.Cbar = Matrix(ny, nx);
  clm.Cbar.set_block(0, 0, Cp);
  return clm;
}

Matrix lmi_matrix(const ClosedLoopMatrices& clm, const LmiCertificate& cand) {
  const std::size_t nx = clm.n_x();
  const std::size_t ne = clm.n_e();
  if (cand.P.rows() != nx || cand.P.cols() != nx)
    throw DimensionError("lmi: P is " + shape_string(cand.P) + ", expected " + std::to_string(nx) + "x" +
                         std::to_string(nx));
  if (clm.B1.rows() != nx || clm.A2.cols() != nx || clm.A2.rows() != ne || clm.Cbar.cols() != nx)
    throw DimensionError("lmi: inconsistent closed-loop blocks");

  const Matrix& P = cand.P;
  Matrix top = clm.A1.transpose() * P + P * clm.A1 + clm.A2.transpose() * clm.A2 +
               cand.eps1 * (clm.Cbar.transpose() * clm.Cbar) + cand.eps2 * Matrix::identity(nx);
  const Matrix PB = P * clm.B1;
  Matrix m(nx + ne, nx + ne);
  m.set_block(0, 0, top);
  m.set_block(0, nx, PB);
  m.set_block(nx, 0, PB.transpose());
  m.set_block(nx, nx, -cand.mu * Matrix::identity(ne));
  // Symmetrize away rounding in A1'P + P A1.
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) m(i, j) = m(j, i) = 0.5 * (m(i, j) + m(j, i));
  return m;
}

double lmi_residual(const ClosedLoopMatrices& clm, const LmiCertificate& cand) {
  if (asymmetry(cand.P) > linalg::kDefaultTol * std::max(1.0, cand.P.max_abs()))
    throw DomainError("lmi_residual: P is not symmetric");
  return linalg::sym_eigenvalues(lmi_matrix(clm, cand)).back();
}

double lmi_scale(const ClosedLoopMatrices& clm, const LmiCertificate& cand) {
  return std::max(1.0, lmi_matrix(clm, cand).max_abs());
}

bool lmi_feasible(const ClosedLoopMatrices& clm, const LmiCertificate& cand, double rel_tol) {
  if (!(cand.mu > 0.0) || cand.eps1 < 0.0 || !(cand.eps2 > 0.0)) return false;
  if (!linalg::is_positive_definite(cand.P, 0.0)) return false;
  return lmi_residual(clm, cand) <= rel_tol * lmi_scale(clm, cand);
}

Vector default_slack_grid(double scale) {
  constexpr int kPoints = 20;
  Vector grid(kPoints);
  for (int k = 0; k < kPoints; ++k) grid[k] = scale * std::pow(10.0, -3.0 + 6.0 * k / (kPoints - 1));
  return grid;
}

LmiCertificate design_certificate(const ClosedLoopMatrices& clm, double eps1, double eps2, const Vector& slack_grid) {
  if (!(eps2 > 0.0)) throw DomainError("design_certificate: eps2 must be positive");
  if (!(eps1 >= 0.0)) throw DomainError("design_certificate: eps1 must be nonnegative");
  const std::size_t nx = clm.n_x();
  if (!linalg::is_hurwitz(clm.A1)) throw DomainError("design-infeasible: A1 is not Hurwitz");

  const Matrix base = clm.A2.transpose() * clm.A2 + eps1 * (clm.Cbar.transpose() * clm.Cbar) +
                      eps2 * Matrix::identity(nx);
  const double scale = linalg::spectral_norm(base);
  const Vector grid = slack_grid.empty() ? default_slack_grid(scale) : slack_grid;

  LmiCertificate best;
  best.mu = std::numeric_limits<double>::infinity();
  for (double rho : grid) {
    if (!(rho > 0.0)) throw DomainError("design_certificate: slack values must be positive");
    Matrix P = linalg::solve_lyapunov(clm.A1, base + rho * Matrix::identity(nx));
    const double coupling = linalg::spectral_norm(clm.B1.transpose() * P);
    // mu > 0 is part of the inequality even when B1 = 0.
    const double mu = std::max(coupling * coupling / rho, 1e-12 * std::max(1.0, scale));
    if (mu < best.mu) best = LmiCertificate{std::move(P), eps1, eps2, mu};
  }
  if (!lmi_feasible(clm, best))
    throw DomainError("design_certificate: constructed candidate fails the LMI check (residual " +
                      std::to_string(lmi_residual(clm, best)) + ")");
  return best;
}

Certificate extract_assumption(const ClosedLoopMatrices& clm, const LmiCertificate& cert) {
  if (!lmi_feasible(clm, cert)) throw DomainError("extract_assumption: LMI candidate is infeasible");
  const Vector ev = linalg::sym_eigenvalues(cert.P);
  const double lo = ev.front();
  const double hi = ev.back();
  const double eps1 = cert.eps1;
  const double eps2 = cert.eps2;

  Certificate c;
  c.name = "lmi-quadratic";
  c.n_x = clm.n_x();
  c.n_e = clm.n_e();
  c.n_y = clm.n_y();
  c.V = [P = cert.P](std::span<const double> x) { return dot(x, P * x); };
  c.W = [](std::span<const double> e) { return norm(e); };
  c.H = [A2 = clm.A2](std::span<const double> x) { return norm(A2 * x); };
  c.delta = [eps1](std::span<const double> y) { return eps1 * dot(y, y); };
  c.alpha = [eps2](double s) { return eps2 * s * s; };
  c.alpha_lower = [lo](double s) { return lo * s * s; };
  c.alpha_upper = [hi](double s) { return hi * s * s; };
  c.output = [Cbar = clm.Cbar](std::span<const double> x) { return Cbar * x; };
  c.gamma = cert.gamma();
  c.L = linalg::spectral_norm(clm.B2);
  return c;
}

}  // namespace etc
