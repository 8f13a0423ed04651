#include "etc/trigger.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "etc/errors.hpp"

namespace etc {

std::string_view to_string(TriggerMode mode) {
  switch (mode) {
    case TriggerMode::OutputFeedback: return "output-feedback";
    case TriggerMode::StateFeedback: return "state-feedback";
    case TriggerMode::PureEvent: return "pure-event";
    case TriggerMode::Periodic: return "periodic";
  }
  return "unknown";
}

TriggerMode parse_trigger_mode(std::string_view name) {
  for (auto m : {TriggerMode::OutputFeedback, TriggerMode::StateFeedback, TriggerMode::PureEvent, TriggerMode::Periodic})
    if (name == to_string(m)) return m;
  throw ConfigError("unknown trigger mode '" + std::string(name) +
                    "' (expected output-feedback, state-feedback, pure-event or periodic)");
}

double masp(double gamma, double L) {
  if (!(gamma >= 0.0) || !(L >= 0.0) || !std::isfinite(gamma) || !std::isfinite(L))
    throw DomainError("masp: gamma and L must be finite and nonnegative");
  if (gamma == 0.0 && L == 0.0) throw DomainError("masp: gamma = L = 0 carries no stabilizing information");
  if (L == 0.0) return std::numbers::pi / (2.0 * gamma);
  if (gamma == 0.0) return std::numeric_limits<double>::infinity();
  if (gamma == L) return 1.0 / L;
  const double ratio = gamma / L;
  const double r = std::sqrt(std::abs(ratio * ratio - 1.0));
  if (gamma > L) return std::atan(r) / (L * r);
  return std::atanh(r) / (L * r);
}

void validate(const TriggerConfig& cfg, const Certificate& cert) {
  const bool uses_sigma = cfg.mode == TriggerMode::StateFeedback || cfg.mode == TriggerMode::PureEvent;
  if (uses_sigma) {
    if (!(cfg.sigma > 0.0 && cfg.sigma < 1.0)) throw ConfigError("sigma must lie in (0,1)");
    if (cert.n_y != cert.n_x)
      throw ConfigError(std::string(to_string(cfg.mode)) + " mode needs a full-state output (y = x); certificate '" +
                        cert.name + "' has n_y = " + std::to_string(cert.n_y) + ", n_x = " + std::to_string(cert.n_x));
  }
  if (cfg.mode == TriggerMode::PureEvent) {
    if (cfg.T != 0.0) throw ConfigError("pure-event mode requires T = 0");
    return;
  }
  if (!(cfg.T > 0.0)) throw ConfigError("dwell time T must be positive");
  const double bound = masp(cert.gamma, cert.L);
  if (!(cfg.T < bound)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "dwell time exceeds MASP: T = " << cfg.T << " >= T(gamma=" << cert.gamma << ", L=" << cert.L
        << ") = " << bound;
    throw ConfigError(msg.str());
  }
}

double trigger_threshold(const HybridState& q, const Certificate& cert, const TriggerConfig& cfg) {
  switch (cfg.mode) {
    case TriggerMode::OutputFeedback:
      return cert.delta(cert.output(q.x));
    case TriggerMode::StateFeedback:
    case TriggerMode::PureEvent: {
      const double h = cert.H(q.x);
      return cfg.sigma * (cert.alpha(norm(q.x)) + h * h + cert.delta(q.x));
    }
    case TriggerMode::Periodic:
      return 0.0;
  }
  return 0.0;
}

double event_value(const HybridState& q, const Certificate& cert, const TriggerConfig& cfg) {
  const double w = cert.W(q.e);
  return cert.gamma * cert.gamma * w * w - trigger_threshold(q, cert, cfg);
}

bool in_flow(const HybridState& q, const Certificate& cert, const TriggerConfig& cfg) {
  switch (cfg.mode) {
    case TriggerMode::Periodic: return q.tau <= cfg.T;
    case TriggerMode::PureEvent: return event_value(q, cert, cfg) <= 0.0;
    default: return q.tau <= cfg.T || event_value(q, cert, cfg) <= 0.0;
  }
}

bool in_jump(const HybridState& q, const Certificate& cert, const TriggerConfig& cfg) {
  switch (cfg.mode) {
    case TriggerMode::Periodic: return q.tau >= cfg.T;
    case TriggerMode::PureEvent: return event_value(q, cert, cfg) >= 0.0;
    default: return q.tau >= cfg.T && event_value(q, cert, cfg) >= 0.0;
  }
}

// ---------------------------------------------------------------------------

ZetaParams ZetaParams::make(double theta, double eta, double gamma) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("zeta params: theta must lie in (0,1)");
  if (!(eta > 0.0)) throw DomainError("zeta params: eta must be positive");
  if (!(gamma >= 0.0)) throw DomainError("zeta params: gamma must be nonnegative");
  return ZetaParams{theta, eta, std::sqrt(gamma * gamma + eta)};
}

ZetaFlow::ZetaFlow(double L, double lambda, double zeta0) : L_(L), lambda_(lambda) {
  if (std::abs(zeta0) > 1.0) {
    chart_ = zeta0 > 0.0 ? Chart::InverseUpper : Chart::InverseLower;
    s_ = 1.0 / zeta0;
  } else {
    chart_ = Chart::Direct;
    s_ = zeta0;
  }
}

double ZetaFlow::value() const noexcept {
  switch (chart_) {
    case Chart::Direct: return s_;
    case Chart::Escaped: return -std::numeric_limits<double>::infinity();
    default: return 1.0 / s_;
  }
}

double ZetaFlow::rhs(double s) const noexcept {
  if (chart_ == Chart::Direct) return -2.0 * L_ * s - lambda_ * (s * s + 1.0);
  return 2.0 * L_ * s + lambda_ * (1.0 + s * s);
}

void ZetaFlow::normalize() noexcept {
  switch (chart_) {
    case Chart::InverseUpper:
      if (s_ >= 1.0) {
        chart_ = Chart::Direct;
        s_ = 1.0 / s_;
      }
      break;
    case Chart::Direct:
      if (s_ < -1.0) {
        chart_ = Chart::InverseLower;
        s_ = 1.0 / s_;
      }
      break;
    case Chart::InverseLower:
      if (s_ >= 0.0) chart_ = Chart::Escaped;
      break;
    case Chart::Escaped:
      break;
  }
}

ZetaFlow ZetaFlow::stepped(double h) const {
  ZetaFlow next = *this;
  next.t_ = t_ + h;
  if (chart_ == Chart::Escaped || h == 0.0) return next;
  const double k1 = rhs(s_);
  const double k2 = rhs(s_ + 0.5 * h * k1);
  const double k3 = rhs(s_ + 0.5 * h * k2);
  const double k4 = rhs(s_ + h * k3);
  next.s_ = s_ + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next.normalize();
  return next;
}

void ZetaFlow::advance_to(double t, double max_step) {
  while (t_ < t) {
    const double h = std::min(max_step, t - t_);
    *this = stepped(h);
    if (t - t_ < 1e-15 * std::max(1.0, t)) t_ = t;
  }
}

double zeta_time(double gamma, double L, const ZetaParams& zp, double step) {
  if (!(step > 0.0)) throw DomainError("zeta_time: step must be positive");
  if (!(gamma >= 0.0) || !(L >= 0.0)) throw DomainError("zeta_time: gamma and L must be nonnegative");
  if (!(zp.theta > 0.0 && zp.theta < 1.0) || !(zp.eta > 0.0))
    throw DomainError("zeta_time: invalid zeta parameters");
  if (std::abs(zp.lambda * zp.lambda - (gamma * gamma + zp.eta)) > 1e-12 * std::max(1.0, zp.lambda * zp.lambda))
    throw DomainError("zeta_time: lambda^2 != gamma^2 + eta");

  ZetaFlow z(L, zp.lambda, 1.0 / zp.theta);
  const double tol = step * 1e-3;
  // zeta' <= -lambda < 0, so the crossing exists; the guard only bounds a
  // pathological step choice.
  const double t_max = 1e6;
  while (z.time() < t_max) {
    ZetaFlow next = z.stepped(step);
    if (next.value() <= zp.theta) {
      double lo = 0.0;
      double hi = step;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (z.stepped(mid).value() <= zp.theta) hi = mid;
        else lo = mid;
      }
      return z.time() + 0.5 * (lo + hi);
    }
    z = next;
  }
  throw DomainError("zeta_time: no crossing found");
}

}  // namespace etc
