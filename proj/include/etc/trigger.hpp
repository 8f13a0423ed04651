#pragma once

#include <string>
#include <string_view>

#include "etc/model.hpp"

namespace etc {

/// OutputFeedback: gamma^2 W^2(e) <= delta(y) or tau <= T.
/// StateFeedback:  gamma^2 W^2(e) <= sigma (alpha(|x|) + H^2(x) + delta(x)) or tau <= T.
/// PureEvent:      the state-feedback condition alone (T = 0).
/// Periodic:       tau <= T alone.
enum class TriggerMode { OutputFeedback, StateFeedback, PureEvent, Periodic };

std::string_view to_string(TriggerMode mode);
TriggerMode parse_trigger_mode(std::string_view name);

struct TriggerConfig {
  TriggerMode mode = TriggerMode::OutputFeedback;
  double T = 0.0;
  double sigma = 0.5;

  friend bool operator==(const TriggerConfig&, const TriggerConfig&) = default;
};

/// Maximum allowable sampling period
///   T(gamma, L) = arctan(r) / (L r)    gamma > L
///               = 1 / L                gamma = L
///               = arctanh(r) / (L r)   gamma < L
/// with r = sqrt(|(gamma/L)^2 - 1|). L = 0 returns the limit pi / (2 gamma);
/// gamma = 0 < L returns +infinity. gamma = L = 0 or negative inputs throw
/// DomainError.
double masp(double gamma, double L);

/// Checks the config against the certificate: sigma in (0,1) where used,
/// 0 < T < masp(gamma, L) for dwell modes, T == 0 for PureEvent, and a
/// full-state output for StateFeedback/PureEvent. Throws ConfigError.
void validate(const TriggerConfig& cfg, const Certificate& cert);

/// Right-hand side the error is compared against (delta(y) or the sigma
/// term); 0 for Periodic.
double trigger_threshold(const HybridState& q, const Certificate& cert, const TriggerConfig& cfg);

/// gamma^2 W^2(e) - threshold(q). The event fires when this becomes >= 0.
double event_value(const HybridState& q, const Certificate& cert, const TriggerConfig& cfg);

/// Membership in the flow set C.
bool in_flow(const HybridState& q, const Certificate& cert, const TriggerConfig& cfg);

/// Membership in the jump set D, taken as {tau >= T and event_value >= 0}
/// (PureEvent: event_value >= 0, Periodic: tau >= T). This contains the
/// closed-set D and additionally the states with tau > T beyond the event
/// surface, which solutions never reach because they jump on the surface.
bool in_jump(const HybridState& q, const Certificate& cert, const TriggerConfig& cfg);

// ---------------------------------------------------------------------------
// zeta-ODE:  zeta' = -2 L zeta - lambda (zeta^2 + 1),  zeta(0) = 1/theta.

struct ZetaParams {
  double theta = 0.0;
  double eta = 0.0;
  double lambda = 0.0;  // sqrt(gamma^2 + eta)

  /// Validates theta in (0,1), eta > 0 and fills lambda.
  static ZetaParams make(double theta, double eta, double gamma);
};

/// Integrates zeta with classical RK4. |zeta| > 1 is handled in the chart
/// s = 1/zeta (s' = 2 L s + lambda (1 + s^2)), which keeps the right-hand side
/// bounded, so a fixed step resolves the whole trajectory from 1/theta down
/// to -infinity (reached in finite time).
class ZetaFlow {
 public:
  ZetaFlow(double L, double lambda, double zeta0);

  [[nodiscard]] double time() const noexcept { return t_; }
  /// Current zeta; -infinity once the trajectory has escaped.
  [[nodiscard]] double value() const noexcept;

  /// One RK4 step of length h (h >= 0), returned as a new flow.
  [[nodiscard]] ZetaFlow stepped(double h) const;
  /// Advances to absolute time `t` in steps no longer than max_step.
  void advance_to(double t, double max_step);

 private:
  enum class Chart { InverseUpper, Direct, InverseLower, Escaped };

  [[nodiscard]] double rhs(double s) const noexcept;
  void normalize() noexcept;

  double L_;
  double lambda_;
  Chart chart_;
  double s_;
  double t_ = 0.0;
};

/// Time for zeta to decrease from 1/theta to theta, with the crossing
/// located by bisection to step * 1e-3.
double zeta_time(double gamma, double L, const ZetaParams& zp, double step);

}  // namespace etc
