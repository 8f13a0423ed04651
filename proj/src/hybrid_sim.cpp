#include "etc/hybrid_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace etc {
namespace {

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

double joint_norm(const HybridState& q) { return std::sqrt(dot(q.x, q.x) + dot(q.e, q.e)); }

std::string describe(const HybridState& q) {
  std::ostringstream os;
  os.precision(6);
  os << "x=(";
  for (std::size_t i = 0; i < q.x.size(); ++i) os << (i ? "," : "") << q.x[i];
  os << ") e=(";
  for (std::size_t i = 0; i < q.e.size(); ++i) os << (i ? "," : "") << q.e[i];
  os << ") tau=" << q.tau;
  return os.str();
}

struct Derivative {
  Vector dx;
  Vector de;
};

Derivative eval(const ClosedLoopSystem& sys, const Vector& x, const Vector& e) {
  return {sys.f(x, e), sys.g(x, e)};
}

Vector axpy(const Vector& y, double a, const Vector& x) {
  Vector out = y;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * x[i];
  return out;
}

// Event predicate on the event value: pure-event mode requires a strictly
// positive value, dwell modes fire on >= 0.
bool fires(double value, TriggerMode mode) { return mode == TriggerMode::PureEvent ? value > 0.0 : value >= 0.0; }

}  // namespace

void validate(const SimSettings& s, const TriggerConfig& cfg) {
  if (!(s.step > 0.0)) throw ConfigError("sim.step must be positive");
  if (!(s.horizon_t > 0.0)) throw ConfigError("sim.horizon_t must be positive");
  if (s.max_jumps < 1) throw ConfigError("sim.max_jumps must be at least 1");
  if (!(s.event_tol > 0.0) || !(s.event_tol < s.step)) throw ConfigError("sim.event_tol must lie in (0, step)");
  if (!(s.blowup_norm > 0.0)) throw ConfigError("sim.blowup_norm must be positive");
  if (cfg.T > 0.0 && s.step > cfg.T / 10.0 * (1.0 + 1e-12))
    throw ConfigError("sim.step must not exceed T/10 (missed-event guard)");
}

HybridState flow_step(const ClosedLoopSystem& sys, const HybridState& q, double h) {
  const Derivative k1 = eval(sys, q.x, q.e);
  const Derivative k2 = eval(sys, axpy(q.x, 0.5 * h, k1.dx), axpy(q.e, 0.5 * h, k1.de));
  const Derivative k3 = eval(sys, axpy(q.x, 0.5 * h, k2.dx), axpy(q.e, 0.5 * h, k2.de));
  const Derivative k4 = eval(sys, axpy(q.x, h, k3.dx), axpy(q.e, h, k3.de));
  for (const Derivative* k : {&k1, &k2, &k3, &k4})
    if (!finite(k->dx) || !finite(k->de))
      throw DivergenceError("non-finite derivative at " + describe(q), HybridSolution{}, q);

  HybridState out;
  out.x.resize(q.x.size());
  out.e.resize(q.e.size());
  for (std::size_t i = 0; i < q.x.size(); ++i)
    out.x[i] = q.x[i] + h / 6.0 * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]);
  for (std::size_t i = 0; i < q.e.size(); ++i)
    out.e[i] = q.e[i] + h / 6.0 * (k1.de[i] + 2.0 * k2.de[i] + 2.0 * k3.de[i] + k4.de[i]);
  out.tau = q.tau + h;
  return out;
}

HybridSolution simulate(const ClosedLoopSystem& sys, const Certificate& cert, const TriggerConfig& cfg,
                        const HybridState& q0, const SimSettings& settings) {
  validate(cfg, cert);
  validate(settings, cfg);
  if (q0.x.size() != sys.n_x || q0.e.size() != sys.n_e)
    throw DimensionError("simulate: initial state has dimensions (" + std::to_string(q0.x.size()) + "," +
                         std::to_string(q0.e.size()) + "), system expects (" + std::to_string(sys.n_x) + "," +
                         std::to_string(sys.n_e) + ")");
  if (!(q0.tau >= 0.0) || !finite(q0.x) || !finite(q0.e))
    throw DomainError("simulate: initial state is outside C u D (tau < 0 or non-finite)");

  const TriggerMode mode = cfg.mode;
  const double T = cfg.T;
  const bool monitors_events = mode != TriggerMode::Periodic;
  auto event_at = [&](const HybridState& q) { return event_value(q, cert, cfg); };
  auto jump_due = [&](const HybridState& q) {
    switch (mode) {
      case TriggerMode::Periodic: return q.tau >= T;
      case TriggerMode::PureEvent: return fires(event_at(q), mode);
      default: return q.tau >= T && fires(event_at(q), mode);
    }
  };

  HybridSolution sol;
  sol.dwell = T;
  HybridState q = q0;
  double t = 0.0;
  double t_ref = -q0.tau;  // time of the last transmission
  std::size_t j = 0;
  sol.segments.push_back(Segment{0, {Sample{t, q}}});

  auto record = [&](double time, const HybridState& state) {
    auto& samples = sol.segments.back().samples;
    if (!settings.record_states && samples.size() >= 2) samples.back() = Sample{time, state};
    else samples.push_back(Sample{time, state});
  };
  auto jump = [&] {
    sol.jump_times.push_back(t);
    if (q.tau > 0.0) {
      sol.inter_event_gaps.push_back(q.tau);
      sol.gap_jumps.push_back(j + 1);
    }
    std::fill(q.e.begin(), q.e.end(), 0.0);
    q.tau = 0.0;
    ++j;
    t_ref = t;
    sol.segments.push_back(Segment{j, {Sample{t, q}}});
  };
  auto diverged = [&](const HybridState& s) { return !finite(s.x) || !finite(s.e) || joint_norm(s) > settings.blowup_norm; };
  auto fail = [&](const HybridState& s) {
    sol.stop = StopReason::Divergence;
    throw DivergenceError("divergence at t=" + std::to_string(t) + ": " + describe(s), sol, s);
  };
  auto step_flow = [&](const HybridState& s, double h) {
    try {
      return flow_step(sys, s, h);
    } catch (const DivergenceError& err) {
      sol.stop = StopReason::Divergence;
      throw DivergenceError(err.what(), sol, err.offending());
    }
  };

  const double t_end = settings.horizon_t;
  const double t_slack = 1e-12 * std::max(1.0, t_end);
  if (diverged(q)) fail(q);

  while (true) {
    if (j >= settings.max_jumps) {
      sol.stop = StopReason::MaxJumps;
      break;
    }
    if (jump_due(q)) {
      jump();
      continue;
    }
    if (t >= t_end - t_slack) {
      sol.stop = StopReason::Horizon;
      break;
    }

    double h = std::min(settings.step, t_end - t);
    bool lands_on_T = false;
    if (T > 0.0 && q.tau < T && q.tau + h >= T) {
      h = T - q.tau;
      lands_on_T = true;
    }
    // Events are only scanned where the trigger condition is active for the
    // whole step: after the dwell time, or always in pure-event mode.
    const bool scan = monitors_events && (mode == TriggerMode::PureEvent || q.tau >= T);

    HybridState next = step_flow(q, h);
    if (lands_on_T) next.tau = T;
    if (diverged(next)) fail(next);

    if (scan && fires(event_at(next), mode)) {
      double lo = 0.0;
      double hi = h;
      HybridState hit = next;
      while (hi - lo > settings.event_tol) {
        const double mid = 0.5 * (lo + hi);
        HybridState trial = step_flow(q, mid);
        if (fires(event_at(trial), mode)) {
          hi = mid;
          hit = std::move(trial);
        } else {
          lo = mid;
        }
      }
      q = std::move(hit);
      t = t_ref + q.tau;
      record(t, q);
      jump();
      continue;
    }

    q = std::move(next);
    t = t_ref + q.tau;
    if (std::abs(t - t_end) <= t_slack) t = t_end;
    record(t, q);
  }
  return sol;
}

std::vector<RSample> r_monitor(const HybridSolution& sol, const Certificate& cert, const ZetaParams& zp,
                               double zeta_step) {
  if (!(zeta_step > 0.0)) throw DomainError("r_monitor: zeta_step must be positive");
  if (sol.dwell > 0.0 && !(sol.dwell < zeta_time(cert.gamma, cert.L, zp, zeta_step)))
    throw DomainError("r_monitor: dwell time is not below zeta_time(theta, eta, gamma, L); R is not a certificate");

  std::vector<RSample> out;
  for (const Segment& seg : sol.segments) {
    ZetaFlow zeta(cert.L, zp.lambda, 1.0 / zp.theta);
    for (const Sample& s : seg.samples) {
      zeta.advance_to(s.q.tau, zeta_step);
      const double z = zeta.value();
      const double w = cert.W(s.q.e);
      const double extra = z > 0.0 ? zp.lambda * z * w * w : 0.0;
      out.push_back(RSample{s.t, seg.j, cert.V(s.q.x) + extra});
    }
  }
  return out;
}

double max_r_increase(const std::vector<RSample>& r) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < r.size(); ++k) worst = std::max(worst, r[k].R - r[k - 1].R);
  return worst;
}

}  // namespace etc
