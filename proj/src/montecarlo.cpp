#include "etc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "etc/io.hpp"
#include "etc/sampling.hpp"

namespace etc {

void validate(const BatchSpec& spec) {
  if (spec.n_runs < 1) throw ConfigError("batch.n_runs must be at least 1");
  if (!(spec.radius > 0.0)) throw ConfigError("batch.radius must be positive");
  validate(spec.sim, spec.trigger);
}

HybridState sample_initial(const BatchSpec& spec, std::size_t n_x, std::size_t n_e, std::size_t k) {
  if (k >= spec.n_runs) throw DomainError("sample_initial: run index out of range");
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(static_cast<std::uint64_t>(k) >> 32)};
  std::mt19937_64 rng(seq);
  const Vector z = sample_ball(rng, n_x + n_e, spec.radius);
  HybridState q;
  q.x.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n_x));
  q.e.assign(z.begin() + static_cast<std::ptrdiff_t>(n_x), z.end());
  q.tau = 0.0;
  return q;
}

BatchReport aggregate(const std::vector<std::optional<HybridSolution>>& runs) {
  BatchReport rep;
  rep.n_runs = runs.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!runs[k]) {
      rep.failures.push_back(k);
      continue;
    }
    const HybridSolution& sol = *runs[k];
    RunStats st;
    st.run = k;
    st.n_events = sol.inter_event_gaps.size();
    if (st.n_events > 0) {
      st.min_gap = *std::min_element(sol.inter_event_gaps.begin(), sol.inter_event_gaps.end());
      double run_sum = 0.0;
      for (std::size_t g = 0; g < st.n_events; ++g) {
        const double gap = sol.inter_event_gaps[g];
        const std::size_t j = sol.gap_jumps[g];
        rep.events.push_back(EventRecord{k, j, sol.jump_times[j - 1], gap});
        run_sum += gap;
        sum += gap;
        rep.tau_min = rep.tau_min ? std::min(*rep.tau_min, gap) : gap;
      }
      st.mean_gap = run_sum / static_cast<double>(st.n_events);
    }
    rep.n_events_total += st.n_events;
    rep.per_run.push_back(st);
  }
  if (rep.n_events_total > 0) rep.tau_avg = sum / static_cast<double>(rep.n_events_total);
  return rep;
}

BatchReport run_batch(const ClosedLoopSystem& sys, const Certificate& cert, const BatchSpec& spec) {
  validate(spec);
  validate(spec.trigger, cert);
  SimSettings settings = spec.sim;
  if (spec.r_check) settings.record_states = true;

  std::vector<std::optional<HybridSolution>> results(spec.n_runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < spec.n_runs; k = next++) {
      const HybridState q0 = sample_initial(spec, sys.n_x, sys.n_e, k);
      try {
        HybridSolution sol = simulate(sys, cert, spec.trigger, q0, settings);
        if (spec.r_check) {
          const auto r = r_monitor(sol, cert, *spec.r_check);
          if (max_r_increase(r) > 1e-6 * std::max(r.front().R, std::numeric_limits<double>::min())) continue;
        }
        results[k] = std::move(sol);
      } catch (const DivergenceError&) {
        // left empty: reported as a failure
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(spec.workers, 1, spec.n_runs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  return aggregate(results);
}

ReportFiles emit_report(const BatchReport& rep, const std::filesystem::path& dir) {
  io::ensure_directory(dir);
  ReportFiles files{dir / "summary.json", dir / "events.csv"};

  nlohmann::json summary = nlohmann::json::object();
  summary["tau_min"] = rep.tau_min ? nlohmann::json(*rep.tau_min) : nlohmann::json(nullptr);
  summary["tau_avg"] = rep.tau_avg ? nlohmann::json(*rep.tau_avg) : nlohmann::json(nullptr);
  summary["n_events_total"] = rep.n_events_total;
  summary["n_runs"] = rep.n_runs;
  summary["failures"] = rep.failures;
  io::write_file(files.summary, io::dump_json(summary) + "\n");

  std::vector<EventRecord> events = rep.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const EventRecord& a, const EventRecord& b) { return std::tie(a.run, a.j) < std::tie(b.run, b.j); });
  std::string csv = "run,j,t_j,gap\n";
  for (const auto& ev : events)
    csv += std::to_string(ev.run) + "," + std::to_string(ev.j) + "," + io::fmt17(ev.t_j) + "," + io::fmt17(ev.gap) + "\n";
  io::write_file(files.events, csv);
  return files;
}

BatchReport load_report(const std::filesystem::path& dir) {
  nlohmann::json summary;
  const auto summary_path = dir / "summary.json";
  try {
    summary = nlohmann::json::parse(io::read_file(summary_path));
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("cannot parse '" + summary_path.string() + "': " + ex.what());
  }
  BatchReport rep;
  try {
    if (!summary.at("tau_min").is_null()) rep.tau_min = summary.at("tau_min").get<double>();
    if (!summary.at("tau_avg").is_null()) rep.tau_avg = summary.at("tau_avg").get<double>();
    rep.n_events_total = summary.at("n_events_total").get<std::size_t>();
    rep.n_runs = summary.at("n_runs").get<std::size_t>();
    rep.failures = summary.at("failures").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("malformed '" + summary_path.string() + "': " + ex.what());
  }

  const auto events_path = dir / "events.csv";
  std::istringstream csv(io::read_file(events_path));
  std::string line;
  std::getline(csv, line);
  if (line != "run,j,t_j,gap") throw IoError("'" + events_path.string() + "': unexpected header '" + line + "'");
  std::size_t lineno = 1;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string run, j, t, gap;
    if (!std::getline(row, run, ',') || !std::getline(row, j, ',') || !std::getline(row, t, ',') ||
        !std::getline(row, gap))
      throw IoError("'" + events_path.string() + "' line " + std::to_string(lineno) + ": expected 4 columns");
    try {
      rep.events.push_back(EventRecord{std::stoul(run), std::stoul(j), std::stod(t), std::stod(gap)});
    } catch (const std::exception&) {
      throw IoError("'" + events_path.string() + "' line " + std::to_string(lineno) + ": malformed number");
    }
  }

  for (std::size_t k = 0; k < rep.n_runs; ++k) {
    if (std::binary_search(rep.failures.begin(), rep.failures.end(), k)) continue;
    RunStats st;
    st.run = k;
    double run_sum = 0.0;
    for (const auto& ev : rep.events) {
      if (ev.run != k) continue;
      st.min_gap = st.n_events == 0 ? ev.gap : std::min(st.min_gap, ev.gap);
      run_sum += ev.gap;
      ++st.n_events;
    }
    if (st.n_events > 0) st.mean_gap = run_sum / static_cast<double>(st.n_events);
    rep.per_run.push_back(st);
  }
  return rep;
}

}  // namespace etc
