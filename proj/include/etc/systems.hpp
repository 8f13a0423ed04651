#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "etc/lti_design.hpp"
#include "etc/model.hpp"

namespace etc {

struct LoopWithCertificate {
  ClosedLoopSystem sys;
  Certificate cert;
};

// ---------------------------------------------------------------------------
// Controlled Lorenz equations
//   x1' = -a x1 + a x2,  x2' = b x1 - x2 - x1 x3 + u,  x3' = x1 x2 - c x3,
// y = x1, static output feedback u = -(p1/p2 a + b) y_hat with y_hat = y + e.

struct LorenzParams {
  double a = 10.0;
  double b = 28.0;
  double c = 8.0 / 3.0;
  double p1 = 2.0;
  double p2 = 30.0;

  friend bool operator==(const LorenzParams&, const LorenzParams&) = default;
};

/// Loop plus the analytic certificate
///   V = p1 x1^2 + p2 x2^2 + p2 x3^2, W = |e|, L = 0, H = a(|x1| + |x2|),
///   alpha(s) = min{a(p1-1), p2-2a, 2 p2 c} s^2, delta(y) = a(p1-1) y^2,
///   gamma^2 = p2 (p1/p2 a + c)^2,
/// bounds min/max{p1,p2} s^2. Requires a,b,c > 0, p1 > 1, p2 > 2a
/// (DomainError naming the violated condition).
LoopWithCertificate lorenz_loop(const LorenzParams& p = {});

// ---------------------------------------------------------------------------
// LTI loops

/// x' = A1 x + B1 e, e' = A2 x + B2 e, y = Cbar x.
ClosedLoopSystem lti_loop(const ClosedLoopMatrices& clm);

/// Assembles the blocks and checks that `cert` has matching dimensions.
ClosedLoopSystem lti_loop(const LtiPlant& plant, const LtiController& ctrl, const Certificate& cert);

/// x' = [[0,1],[-2,3]] x + [0;1] u with u = [1 -4] x (full-state output).
LtiPlant tabuada_plant();
LtiController tabuada_controller();

struct LtiLoopDesign {
  ClosedLoopSystem sys;
  Certificate cert;
  ClosedLoopMatrices clm;
  LmiCertificate lmi;
};

/// assemble -> design_certificate -> extract_assumption -> lti_loop.
LtiLoopDesign design_lti_loop(const LtiPlant& plant, const LtiController& ctrl, double eps1, double eps2,
                              const Vector& slack_grid = {});

// ---------------------------------------------------------------------------
// Sampled check of the certificate inequalities

struct InequalityCheck {
  /// Largest violation (lhs - rhs) normalized by max(1, sum of |terms|) at
  /// that sample; <= 0 means no violation was observed.
  double max_violation = -std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  std::size_t skipped = 0;
  Vector worst_x;
  Vector worst_e;

  [[nodiscard]] bool pass(double tol) const { return max_violation <= tol; }
};

struct AssumptionReport {
  double tolerance = 1e-5;
  InequalityCheck bounds;  // alpha_lower(|x|) <= V(x) <= alpha_upper(|x|)
  InequalityCheck v_dot;   // <grad V, f> <= -alpha - H^2 - delta + gamma^2 W^2
  InequalityCheck w_dot;   // <grad W, g> <= L W + H

  [[nodiscard]] bool pass() const { return bounds.pass(tolerance) && v_dot.pass(tolerance) && w_dot.pass(tolerance); }
};

/// Evaluates the three inequalities at n_samples points (x, e) drawn
/// uniformly from the ball of the given radius in R^(n_x + n_e), plus the
/// origin. Directional derivatives use central differences with step
/// 1e-6 * max(1, |point|); a sample is skipped for an inequality when the
/// one-sided differences disagree (a kink of |.| within one step).
/// Violations are data: nothing is thrown for a failing certificate.
AssumptionReport check_assumption_sampled(const ClosedLoopSystem& sys, const Certificate& cert,
                                          std::size_t n_samples, double radius, std::uint64_t seed,
                                          double tolerance = 1e-5);

}  // namespace etc
