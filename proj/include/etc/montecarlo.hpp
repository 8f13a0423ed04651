#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "etc/hybrid_sim.hpp"

namespace etc {

/// n_runs initial conditions drawn uniformly from |(x, e)| <= radius with
/// tau = 0, each simulated to sim.horizon_t.
struct BatchSpec {
  std::size_t n_runs = 200;
  double radius = 100.0;
  std::uint64_t seed = 1;
  TriggerConfig trigger;
  SimSettings sim;
  std::size_t workers = 1;
  /// When set, every run is also checked for a nonincreasing R (tolerance
  /// 1e-6 * R(0)); a violation marks the run as failed.
  std::optional<ZetaParams> r_check;
};

struct RunStats {
  std::size_t run = 0;
  std::size_t n_events = 0;
  double min_gap = 0.0;   // 0 when the run has no events
  double mean_gap = 0.0;  // 0 when the run has no events

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

struct EventRecord {
  std::size_t run = 0;
  std::size_t j = 0;  // jump count after the transmission (1-based)
  double t_j = 0.0;
  double gap = 0.0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Statistics pool every inter-event gap of every completed run: tau_avg is
/// the mean of the pooled gaps, not a mean of per-run means. Diverged runs
/// are listed in `failures` and excluded.
struct BatchReport {
  std::optional<double> tau_min;
  std::optional<double> tau_avg;
  std::size_t n_events_total = 0;
  std::size_t n_runs = 0;
  std::vector<RunStats> per_run;     // completed runs, ascending run index
  std::vector<std::size_t> failures;  // ascending run index
  std::vector<EventRecord> events;    // sorted by (run, j)

  friend bool operator==(const BatchReport&, const BatchReport&) = default;
};

void validate(const BatchSpec& spec);

/// Deterministic in (seed, k): the same pair always yields the same state.
HybridState sample_initial(const BatchSpec& spec, std::size_t n_x, std::size_t n_e, std::size_t k);

/// Runs every initial condition (on spec.workers threads) and aggregates in
/// run-index order, so the report does not depend on scheduling.
BatchReport run_batch(const ClosedLoopSystem& sys, const Certificate& cert, const BatchSpec& spec);

/// Builds a report from per-run solutions (index = run); nullopt marks a
/// failed run.
BatchReport aggregate(const std::vector<std::optional<HybridSolution>>& runs);

struct ReportFiles {
  std::filesystem::path summary;
  std::filesystem::path events;
};

/// Writes <dir>/summary.json (tau_min, tau_avg, n_events_total, n_runs,
/// failures) and <dir>/events.csv (run,j,t_j,gap). Overwrites existing files.
ReportFiles emit_report(const BatchReport& rep, const std::filesystem::path& dir);

/// Reads the two files back; per-run statistics are recomputed from the
/// event rows.
BatchReport load_report(const std::filesystem::path& dir);

}  // namespace etc
