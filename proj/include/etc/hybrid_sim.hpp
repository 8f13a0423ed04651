#pragma once

#include <cstddef>
#include <vector>

#include "etc/errors.hpp"
#include "etc/model.hpp"
#include "etc/trigger.hpp"

namespace etc {

struct SimSettings {
  double step = 1e-3;          // RK4 step
  double horizon_t = 10.0;     // stop time
  std::size_t max_jumps = 10'000'000;
  double event_tol = 1e-6;     // bisection tolerance on the jump time
  double blowup_norm = 1e9;    // |(x,e)| above this is a divergence
  bool record_states = true;   // false keeps only the first and last sample of each flow segment

  friend bool operator==(const SimSettings&, const SimSettings&) = default;
};

/// Rejects step <= 0, horizon <= 0, max_jumps == 0, event_tol >= step, and
/// (for T > 0) step > T/10, which would let an event slip between steps.
void validate(const SimSettings& s, const TriggerConfig& cfg);

struct Sample {
  double t = 0.0;
  HybridState q;
};

/// Flow on [t_j, t_{j+1}] at jump count j.
struct Segment {
  std::size_t j = 0;
  std::vector<Sample> samples;
};

enum class StopReason { Horizon, MaxJumps, Divergence };

struct HybridSolution {
  std::vector<Segment> segments;
  Vector jump_times;
  /// Clock value right before each jump, i.e. the time since the previous
  /// transmission. A reset of the initial state at tau = 0 (possible only
  /// in pure-event mode) is a jump but not a gap.
  Vector inter_event_gaps;
  /// Jump count j reached by the transmission that closed each gap (1-based).
  std::vector<std::size_t> gap_jumps;
  double dwell = 0.0;  // T the solution was generated with
  StopReason stop = StopReason::Horizon;

  [[nodiscard]] const Sample& final_sample() const { return segments.back().samples.back(); }
};

/// Raised on |(x,e)| > blowup_norm or a non-finite derivative. Carries the
/// solution up to the last finite state and the offending state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, HybridSolution partial, HybridState offending)
      : Error(what), partial_(std::move(partial)), offending_(std::move(offending)) {}

  [[nodiscard]] const HybridSolution& partial() const noexcept { return partial_; }
  [[nodiscard]] const HybridState& offending() const noexcept { return offending_; }

 private:
  HybridSolution partial_;
  HybridState offending_;
};

/// One classical RK4 step of (x', e', tau') = (f, g, 1); tau advances by h.
HybridState flow_step(const ClosedLoopSystem& sys, const HybridState& q, double h);

/// Jump-priority solution: flow while not in D; once tau >= T the event
/// function gamma^2 W^2(e) - threshold(q) is scanned at step boundaries and a
/// sign change is bisected to event_tol. A step that would overshoot tau = T
/// is shortened to land on it, so an event pending at tau = T jumps exactly
/// there. Jumps reset (x, e, tau) -> (x, 0, 0). In pure-event mode an event
/// needs a strictly positive event value, so the equilibrium (where the
/// value is identically 0) flows instead of chattering.
HybridSolution simulate(const ClosedLoopSystem& sys, const Certificate& cert, const TriggerConfig& cfg,
                        const HybridState& q0, const SimSettings& settings);

struct RSample {
  double t = 0.0;
  std::size_t j = 0;
  double R = 0.0;
};

/// R(q) = V(x) + max{0, lambda zeta(tau) W(e)^2} along every sample of the
/// solution, zeta integrated with ZetaFlow in steps <= zeta_step. Requires
/// T < zeta_time(theta, eta, gamma, L) when the solution has a dwell time
/// (DomainError otherwise).
std::vector<RSample> r_monitor(const HybridSolution& sol, const Certificate& cert, const ZetaParams& zp,
                               double zeta_step = 1e-4);

/// Largest R_{k+1} - R_k over consecutive samples (-inf for fewer than two).
double max_r_increase(const std::vector<RSample>& r);

}  // namespace etc
