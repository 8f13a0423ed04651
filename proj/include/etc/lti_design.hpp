#pragma once

#include <cstddef>

#include "etc/matrix.hpp"
#include "etc/model.hpp"

namespace etc {

/// x_p' = A x_p + B u,  y = C x_p.
struct LtiPlant {
  Matrix A;
  Matrix B;
  Matrix C;

  friend bool operator==(const LtiPlant&, const LtiPlant&) = default;
};

/// x_c' = A x_c + B y,  u = C x_c + D y. A static gain has empty A, B, C
/// (n_c = 0); for it the input error e_u is identically zero (u is a
/// function of the held output only), so the network error is e = e_y.
struct LtiController {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;

  static LtiController static_gain(Matrix D);
  [[nodiscard]] bool is_static() const { return A.rows() == 0; }

  friend bool operator==(const LtiController&, const LtiController&) = default;
};

/// Linear hybrid flow  x' = A1 x + B1 e,  e' = A2 x + B2 e, together with
/// Cbar = [C_p 0] so that y = Cbar x.
struct ClosedLoopMatrices {
  Matrix A1;
  Matrix B1;
  Matrix A2;
  Matrix B2;
  Matrix Cbar;

  [[nodiscard]] std::size_t n_x() const { return A1.rows(); }
  [[nodiscard]] std::size_t n_e() const { return B1.cols(); }
  [[nodiscard]] std::size_t n_y() const { return Cbar.rows(); }
};

/// Candidate (P, eps1, eps2, mu) for the block inequality
///   [ A1'P + P A1 + A2'A2 + eps1 Cbar'Cbar + eps2 I    P B1 ]
///   [ B1'P                                         -mu I ]  <= 0.
struct LmiCertificate {
  Matrix P;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double mu = 0.0;

  [[nodiscard]] double gamma() const;

  friend bool operator==(const LmiCertificate&, const LmiCertificate&) = default;
};

/// Builds the closed-loop blocks from plant and controller. Throws a
/// DimensionError naming the offending block.
ClosedLoopMatrices assemble(const LtiPlant& plant, const LtiController& ctrl);

/// The symmetric block matrix above.
Matrix lmi_matrix(const ClosedLoopMatrices& clm, const LmiCertificate& cand);

/// lambda_max of lmi_matrix; the candidate is feasible iff this is <= tol.
double lmi_residual(const ClosedLoopMatrices& clm, const LmiCertificate& cand);

/// Scale used to make the feasibility tolerance relative: max(1, max |entry|)
/// of the block matrix.
double lmi_scale(const ClosedLoopMatrices& clm, const LmiCertificate& cand);

bool lmi_feasible(const ClosedLoopMatrices& clm, const LmiCertificate& cand, double rel_tol = 1e-7);

/// 20 log-spaced slacks in [1e-3, 1e3] * scale.
Vector default_slack_grid(double scale);

/// Constructive certificate. For each slack rho:
///   A1' P + P A1 = -(A2'A2 + eps1 Cbar'Cbar + eps2 I + rho I),
///   mu(rho) = |B1' P|^2 / rho,
/// which puts the Schur complement exactly on the boundary. Returns the
/// candidate with the smallest mu. An empty grid selects default_slack_grid
/// scaled by |A2'A2 + eps1 Cbar'Cbar + eps2 I|.
LmiCertificate design_certificate(const ClosedLoopMatrices& clm, double eps1, double eps2,
                                  const Vector& slack_grid = {});

/// Quadratic certificate: V = x'Px, W = |e|, H = |A2 x|, L = |B2|,
/// gamma = sqrt(mu), alpha(s) = eps2 s^2, delta(y) = eps1 |y|^2, bounds from
/// the extreme eigenvalues of P. DomainError if the candidate is infeasible.
Certificate extract_assumption(const ClosedLoopMatrices& clm, const LmiCertificate& cert);

}  // namespace etc
