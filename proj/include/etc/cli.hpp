#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "etc/hybrid_sim.hpp"
#include "etc/lti_design.hpp"
#include "etc/montecarlo.hpp"
#include "etc/systems.hpp"

namespace etc::cli {

/// Where the certificate comes from:
///   Auto  - the analytic one (lorenz) or design_certificate (LTI systems),
///   Lmi   - an inline LMI candidate {P, eps1, eps2, mu} (LTI systems only),
///   Gains - bare {gamma, L}, enough for `masp` and nothing else.
struct CertificateSpec {
  enum class Kind { Auto, Lmi, Gains };
  Kind kind = Kind::Auto;
  LmiCertificate lmi;
  double gamma = 0.0;
  double L = 0.0;

  friend bool operator==(const CertificateSpec&, const CertificateSpec&) = default;
};

/// Defaults are the ones of `defaults_for(system)`; RunConfig{} itself is a
/// neutral base.
struct RunConfig {
  std::string system = "lti-sf-tabuada";  // lorenz | lti-sf-tabuada | lti-custom
  LorenzParams lorenz;
  std::optional<LtiPlant> plant;            // lti-custom only
  std::optional<LtiController> controller;  // lti-custom only
  CertificateSpec certificate;
  double design_eps1 = 1e-2;
  double design_eps2 = 1e-2;
  std::optional<double> gamma;  // replaces the certificate's gamma
  TriggerConfig trigger{TriggerMode::StateFeedback, 0.075, 0.5};
  SimSettings sim;
  std::optional<HybridState> initial;  // simulate: otherwise run 0 of the batch sampler
  std::size_t n_runs = 200;
  double radius = 100.0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  double zeta_theta = 0.05;
  double zeta_eta = 0.01;
  std::string output_dir = "out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Presets: lorenz (output feedback, T = 0.01, 50 runs of radius 10 over
/// 20 s), lti-sf-tabuada (state feedback, T = 0.075, design eps = (0, 0.68)).
RunConfig defaults_for(const std::string& system);

/// Strict schema: unknown keys and wrongly typed fields raise ConfigError
/// naming the field path. Missing keys keep their defaults.
RunConfig load_config(const nlohmann::json& j);
/// Parse errors carry the line and column of the offending character.
RunConfig load_config_file(const std::filesystem::path& path);
/// Every field, so that load_config(emit_config(c)) == c.
nlohmann::json emit_config(const RunConfig& cfg);

struct ResolvedLoop {
  ClosedLoopSystem sys;
  Certificate cert;
  std::optional<ClosedLoopMatrices> clm;
  std::optional<LmiCertificate> lmi;
};

/// Builds the system and its certificate (design, inline LMI check, gamma
/// override). ConfigError for inconsistent sources.
ResolvedLoop resolve(const RunConfig& cfg);

BatchSpec batch_spec(const RunConfig& cfg);
ZetaParams zeta_params(const RunConfig& cfg, const Certificate& cert);

nlohmann::json certificate_json(const ResolvedLoop& loop);

/// t,j,x1..xn,e1..em,tau
void write_states_csv(const HybridSolution& sol, const std::filesystem::path& path);
/// run,j,t_j,gap (run = 0)
void write_events_csv(const HybridSolution& sol, const std::filesystem::path& path);
/// t,j,R
void write_r_csv(const std::vector<RSample>& r, const std::filesystem::path& path);
/// event_index,t_j,gap,T_ref: one row per inter-event gap, event_index
/// counting from 1. A solution without events yields the header only.
void emit_plot_data(const HybridSolution& sol, double T_ref, const std::filesystem::path& path);

/// Runs one subcommand (args exclude the program name). Returns 0 on
/// success, 1 on validation, domain, config or I/O errors (and on a failed
/// `check`), 2 on divergence. ETC_LAB_SEED overrides the config seed and is
/// itself overridden by --seed.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace etc::cli
