#include "etc/cli.hpp"

#include <cstdlib>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "etc/io.hpp"

namespace etc::cli {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError("config field '" + path + "': expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("config field '" + join(path, it.key()) + "': unknown key");
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError("config field '" + field + "': expected a number");
  return j.get<double>();
}

std::uint64_t count(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw ConfigError("config field '" + field + "': expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError("config field '" + field + "': expected a string");
  return j.get<std::string>();
}

Vector vector_of(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("config field '" + field + "': expected a list of numbers");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return v;
}

template <class F>
void read(const json& j, const std::string& path, const char* key, F&& apply) {
  if (j.contains(key)) apply(j.at(key), join(path, key));
}

void write_csv_row(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ",";
    out += c;
    first = false;
  }
  out += "\n";
}

std::uint64_t parse_seed(const std::string& s, const std::string& source) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(source + ": '" + s + "' is not a nonnegative integer seed");
  }
  if (pos != s.size()) throw ConfigError(source + ": '" + s + "' is not a nonnegative integer seed");
  return v;
}

}  // namespace

RunConfig defaults_for(const std::string& system) {
  RunConfig cfg;
  cfg.system = system;
  if (system == "lorenz") {
    cfg.trigger = TriggerConfig{TriggerMode::OutputFeedback, 0.01, 0.5};
    cfg.sim.horizon_t = 20.0;
    cfg.n_runs = 50;
    cfg.radius = 10.0;
  } else if (system == "lti-sf-tabuada") {
    cfg.design_eps1 = 0.0;
    cfg.design_eps2 = 0.68;
  }
  return cfg;
}

RunConfig load_config(const json& j) {
  check_object(j, "", {"system", "lorenz", "plant", "controller", "certificate", "design", "gamma", "trigger", "sim",
                       "initial", "batch", "zeta", "output_dir"});
  RunConfig cfg = defaults_for(j.contains("system") ? text(j.at("system"), "system") : RunConfig{}.system);

  read(j, "", "lorenz", [&](const json& v, const std::string& p) {
    check_object(v, p, {"a", "b", "c", "p1", "p2"});
    read(v, p, "a", [&](const json& x, const std::string& f) { cfg.lorenz.a = number(x, f); });
    read(v, p, "b", [&](const json& x, const std::string& f) { cfg.lorenz.b = number(x, f); });
    read(v, p, "c", [&](const json& x, const std::string& f) { cfg.lorenz.c = number(x, f); });
    read(v, p, "p1", [&](const json& x, const std::string& f) { cfg.lorenz.p1 = number(x, f); });
    read(v, p, "p2", [&](const json& x, const std::string& f) { cfg.lorenz.p2 = number(x, f); });
  });
  read(j, "", "plant", [&](const json& v, const std::string& p) {
    check_object(v, p, {"A", "B", "C"});
    for (const char* k : {"A", "B", "C"})
      if (!v.contains(k)) throw ConfigError("config field '" + join(p, k) + "': missing");
    cfg.plant = LtiPlant{io::matrix_from_json(v.at("A"), p + ".A"), io::matrix_from_json(v.at("B"), p + ".B"),
                         io::matrix_from_json(v.at("C"), p + ".C")};
  });
  read(j, "", "controller", [&](const json& v, const std::string& p) {
    check_object(v, p, {"A", "B", "C", "D"});
    if (!v.contains("D")) throw ConfigError("config field '" + p + ".D': missing");
    const Matrix D = io::matrix_from_json(v.at("D"), p + ".D");
    if (!v.contains("A") && !v.contains("B") && !v.contains("C")) {
      cfg.controller = LtiController::static_gain(D);
      return;
    }
    for (const char* k : {"A", "B", "C"})
      if (!v.contains(k)) throw ConfigError("config field '" + join(p, k) + "': missing (dynamic controller)");
    cfg.controller = LtiController{io::matrix_from_json(v.at("A"), p + ".A"), io::matrix_from_json(v.at("B"), p + ".B"),
                                   io::matrix_from_json(v.at("C"), p + ".C"), D};
  });
  read(j, "", "certificate", [&](const json& v, const std::string& p) {
    if (v.is_string()) {
      if (v.get<std::string>() != "auto") throw ConfigError("config field 'certificate': expected \"auto\" or an object");
      cfg.certificate = CertificateSpec{};
      return;
    }
    if (v.is_object() && v.contains("P")) {
      check_object(v, p, {"P", "eps1", "eps2", "mu"});
      CertificateSpec cs;
      cs.kind = CertificateSpec::Kind::Lmi;
      cs.lmi.P = io::matrix_from_json(v.at("P"), p + ".P");
      for (const char* k : {"eps1", "eps2", "mu"})
        if (!v.contains(k)) throw ConfigError("config field '" + join(p, k) + "': missing");
      cs.lmi.eps1 = number(v.at("eps1"), p + ".eps1");
      cs.lmi.eps2 = number(v.at("eps2"), p + ".eps2");
      cs.lmi.mu = number(v.at("mu"), p + ".mu");
      cfg.certificate = cs;
      return;
    }
    check_object(v, p, {"gamma", "L"});
    if (!v.contains("gamma") || !v.contains("L"))
      throw ConfigError("config field 'certificate': expected \"auto\", {P, eps1, eps2, mu} or {gamma, L}");
    CertificateSpec cs;
    cs.kind = CertificateSpec::Kind::Gains;
    cs.gamma = number(v.at("gamma"), p + ".gamma");
    cs.L = number(v.at("L"), p + ".L");
    cfg.certificate = cs;
  });
  read(j, "", "design", [&](const json& v, const std::string& p) {
    check_object(v, p, {"eps1", "eps2"});
    read(v, p, "eps1", [&](const json& x, const std::string& f) { cfg.design_eps1 = number(x, f); });
    read(v, p, "eps2", [&](const json& x, const std::string& f) { cfg.design_eps2 = number(x, f); });
  });
  read(j, "", "gamma", [&](const json& v, const std::string& p) {
    if (!v.is_null()) cfg.gamma = number(v, p);
  });
  read(j, "", "trigger", [&](const json& v, const std::string& p) {
    check_object(v, p, {"mode", "T", "sigma"});
    read(v, p, "mode", [&](const json& x, const std::string& f) { cfg.trigger.mode = parse_trigger_mode(text(x, f)); });
    read(v, p, "T", [&](const json& x, const std::string& f) { cfg.trigger.T = number(x, f); });
    read(v, p, "sigma", [&](const json& x, const std::string& f) { cfg.trigger.sigma = number(x, f); });
  });
  read(j, "", "sim", [&](const json& v, const std::string& p) {
    check_object(v, p, {"step", "horizon_t", "max_jumps", "event_tol", "blowup_norm", "record_states"});
    read(v, p, "step", [&](const json& x, const std::string& f) { cfg.sim.step = number(x, f); });
    read(v, p, "horizon_t", [&](const json& x, const std::string& f) { cfg.sim.horizon_t = number(x, f); });
    read(v, p, "max_jumps", [&](const json& x, const std::string& f) { cfg.sim.max_jumps = count(x, f); });
    read(v, p, "event_tol", [&](const json& x, const std::string& f) { cfg.sim.event_tol = number(x, f); });
    read(v, p, "blowup_norm", [&](const json& x, const std::string& f) { cfg.sim.blowup_norm = number(x, f); });
    read(v, p, "record_states", [&](const json& x, const std::string& f) {
      if (!x.is_boolean()) throw ConfigError("config field '" + f + "': expected true or false");
      cfg.sim.record_states = x.get<bool>();
    });
  });
  read(j, "", "initial", [&](const json& v, const std::string& p) {
    if (v.is_null()) return;
    check_object(v, p, {"x", "e", "tau"});
    if (!v.contains("x") || !v.contains("e")) throw ConfigError("config field '" + p + "': needs both x and e");
    HybridState q;
    q.x = vector_of(v.at("x"), p + ".x");
    q.e = vector_of(v.at("e"), p + ".e");
    read(v, p, "tau", [&](const json& x, const std::string& f) { q.tau = number(x, f); });
    cfg.initial = q;
  });
  read(j, "", "batch", [&](const json& v, const std::string& p) {
    check_object(v, p, {"n_runs", "radius", "seed", "workers"});
    read(v, p, "n_runs", [&](const json& x, const std::string& f) { cfg.n_runs = count(x, f); });
    read(v, p, "radius", [&](const json& x, const std::string& f) { cfg.radius = number(x, f); });
    read(v, p, "seed", [&](const json& x, const std::string& f) { cfg.seed = count(x, f); });
    read(v, p, "workers", [&](const json& x, const std::string& f) { cfg.workers = count(x, f); });
  });
  read(j, "", "zeta", [&](const json& v, const std::string& p) {
    check_object(v, p, {"theta", "eta"});
    read(v, p, "theta", [&](const json& x, const std::string& f) { cfg.zeta_theta = number(x, f); });
    read(v, p, "eta", [&](const json& x, const std::string& f) { cfg.zeta_eta = number(x, f); });
  });
  read(j, "", "output_dir", [&](const json& v, const std::string& p) { cfg.output_dir = text(v, p); });
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  const std::string body = io::read_file(path);
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& ex) {
    throw ConfigError("config '" + path.string() + "': " + ex.what());
  }
  return load_config(j);
}

json emit_config(const RunConfig& cfg) {
  json j = json::object();
  j["system"] = cfg.system;
  j["lorenz"] = {{"a", cfg.lorenz.a}, {"b", cfg.lorenz.b}, {"c", cfg.lorenz.c}, {"p1", cfg.lorenz.p1}, {"p2", cfg.lorenz.p2}};
  if (cfg.plant)
    j["plant"] = {{"A", io::matrix_to_json(cfg.plant->A)},
                  {"B", io::matrix_to_json(cfg.plant->B)},
                  {"C", io::matrix_to_json(cfg.plant->C)}};
  if (cfg.controller) {
    json c = {{"D", io::matrix_to_json(cfg.controller->D)}};
    if (!cfg.controller->is_static()) {
      c["A"] = io::matrix_to_json(cfg.controller->A);
      c["B"] = io::matrix_to_json(cfg.controller->B);
      c["C"] = io::matrix_to_json(cfg.controller->C);
    }
    j["controller"] = c;
  }
  switch (cfg.certificate.kind) {
    case CertificateSpec::Kind::Auto: j["certificate"] = "auto"; break;
    case CertificateSpec::Kind::Lmi:
      j["certificate"] = {{"P", io::matrix_to_json(cfg.certificate.lmi.P)},
                          {"eps1", cfg.certificate.lmi.eps1},
                          {"eps2", cfg.certificate.lmi.eps2},
                          {"mu", cfg.certificate.lmi.mu}};
      break;
    case CertificateSpec::Kind::Gains: j["certificate"] = {{"gamma", cfg.certificate.gamma}, {"L", cfg.certificate.L}}; break;
  }
  j["design"] = {{"eps1", cfg.design_eps1}, {"eps2", cfg.design_eps2}};
  if (cfg.gamma) j["gamma"] = *cfg.gamma;
  j["trigger"] = {{"mode", std::string(to_string(cfg.trigger.mode))}, {"T", cfg.trigger.T}, {"sigma", cfg.trigger.sigma}};
  j["sim"] = {{"step", cfg.sim.step},           {"horizon_t", cfg.sim.horizon_t},
              {"max_jumps", cfg.sim.max_jumps}, {"event_tol", cfg.sim.event_tol},
              {"blowup_norm", cfg.sim.blowup_norm}, {"record_states", cfg.sim.record_states}};
  if (cfg.initial) j["initial"] = {{"x", cfg.initial->x}, {"e", cfg.initial->e}, {"tau", cfg.initial->tau}};
  j["batch"] = {{"n_runs", cfg.n_runs}, {"radius", cfg.radius}, {"seed", cfg.seed}, {"workers", cfg.workers}};
  j["zeta"] = {{"theta", cfg.zeta_theta}, {"eta", cfg.zeta_eta}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

ResolvedLoop resolve(const RunConfig& cfg) {
  using Kind = CertificateSpec::Kind;
  if (cfg.certificate.kind == Kind::Gains)
    throw ConfigError("certificate {gamma, L} carries no Lyapunov data; it is accepted by 'masp' only");

  ResolvedLoop out;
  if (cfg.system == "lorenz") {
    if (cfg.plant || cfg.controller) throw ConfigError("config fields 'plant'/'controller' apply to LTI systems only");
    if (cfg.certificate.kind == Kind::Lmi) throw ConfigError("certificate: an LMI candidate needs an LTI system");
    auto loop = lorenz_loop(cfg.lorenz);
    out.sys = std::move(loop.sys);
    out.cert = std::move(loop.cert);
  } else if (cfg.system == "lti-sf-tabuada" || cfg.system == "lti-custom") {
    LtiPlant plant;
    LtiController ctrl;
    if (cfg.system == "lti-sf-tabuada") {
      if (cfg.plant || cfg.controller)
        throw ConfigError("system 'lti-sf-tabuada' is built in; use 'lti-custom' to give plant/controller");
      plant = tabuada_plant();
      ctrl = tabuada_controller();
    } else {
      if (!cfg.plant || !cfg.controller) throw ConfigError("system 'lti-custom' requires 'plant' and 'controller'");
      plant = *cfg.plant;
      ctrl = *cfg.controller;
    }
    if (cfg.certificate.kind == Kind::Auto) {
      auto d = design_lti_loop(plant, ctrl, cfg.design_eps1, cfg.design_eps2);
      out.sys = std::move(d.sys);
      out.cert = std::move(d.cert);
      out.clm = std::move(d.clm);
      out.lmi = std::move(d.lmi);
    } else {
      const ClosedLoopMatrices clm = assemble(plant, ctrl);
      const LmiCertificate& lmi = cfg.certificate.lmi;
      if (lmi.P.rows() != clm.n_x() || lmi.P.cols() != clm.n_x())
        throw ConfigError("config field 'certificate.P': expected " + std::to_string(clm.n_x()) + "x" +
                          std::to_string(clm.n_x()) + ", got " + shape_string(lmi.P));
      if (!lmi_feasible(clm, lmi))
        throw ConfigError("certificate: LMI candidate is infeasible (lambda_max = " +
                          io::fmt17(lmi_residual(clm, lmi)) + ", scale " + io::fmt17(lmi_scale(clm, lmi)) + ")");
      out.cert = extract_assumption(clm, lmi);
      out.sys = lti_loop(clm);
      out.clm = clm;
      out.lmi = lmi;
    }
  } else {
    throw ConfigError("config field 'system': unknown system '" + cfg.system +
                      "' (expected lorenz, lti-sf-tabuada or lti-custom)");
  }
  if (cfg.gamma) {
    if (!(*cfg.gamma > 0.0) || !std::isfinite(*cfg.gamma)) throw ConfigError("config field 'gamma': must be positive");
    out.cert.gamma = *cfg.gamma;
  }
  return out;
}

BatchSpec batch_spec(const RunConfig& cfg) {
  BatchSpec spec;
  spec.n_runs = cfg.n_runs;
  spec.radius = cfg.radius;
  spec.seed = cfg.seed;
  spec.trigger = cfg.trigger;
  spec.sim = cfg.sim;
  spec.sim.record_states = false;
  spec.workers = cfg.workers;
  return spec;
}

ZetaParams zeta_params(const RunConfig& cfg, const Certificate& cert) {
  try {
    return ZetaParams::make(cfg.zeta_theta, cfg.zeta_eta, cert.gamma);
  } catch (const DomainError& ex) {
    throw ConfigError(std::string("config field 'zeta': ") + ex.what());
  }
}

json certificate_json(const ResolvedLoop& loop) {
  if (!loop.lmi) throw ConfigError("design: system '" + loop.sys.name + "' has an analytic certificate; design applies to LTI systems");
  return json{{"P", io::matrix_to_json(loop.lmi->P)},
              {"eps1", loop.lmi->eps1},
              {"eps2", loop.lmi->eps2},
              {"mu", loop.lmi->mu},
              {"gamma", loop.cert.gamma},
              {"L", loop.cert.L},
              {"T_max", masp(loop.cert.gamma, loop.cert.L)}};
}

void write_states_csv(const HybridSolution& sol, const std::filesystem::path& path) {
  std::string csv = "t,j";
  const HybridState& q0 = sol.segments.front().samples.front().q;
  for (std::size_t i = 0; i < q0.x.size(); ++i) csv += ",x" + std::to_string(i + 1);
  for (std::size_t i = 0; i < q0.e.size(); ++i) csv += ",e" + std::to_string(i + 1);
  csv += ",tau\n";
  for (const Segment& seg : sol.segments)
    for (const Sample& s : seg.samples) {
      csv += io::fmt17(s.t) + "," + std::to_string(seg.j);
      for (double v : s.q.x) csv += "," + io::fmt17(v);
      for (double v : s.q.e) csv += "," + io::fmt17(v);
      csv += "," + io::fmt17(s.q.tau) + "\n";
    }
  io::write_file(path, csv);
}

void write_events_csv(const HybridSolution& sol, const std::filesystem::path& path) {
  std::string csv = "run,j,t_j,gap\n";
  for (std::size_t k = 0; k < sol.inter_event_gaps.size(); ++k) {
    const std::size_t j = sol.gap_jumps[k];
    write_csv_row(csv, {"0", std::to_string(j), io::fmt17(sol.jump_times[j - 1]), io::fmt17(sol.inter_event_gaps[k])});
  }
  io::write_file(path, csv);
}

void write_r_csv(const std::vector<RSample>& r, const std::filesystem::path& path) {
  std::string csv = "t,j,R\n";
  for (const RSample& s : r) write_csv_row(csv, {io::fmt17(s.t), std::to_string(s.j), io::fmt17(s.R)});
  io::write_file(path, csv);
}

void emit_plot_data(const HybridSolution& sol, double T_ref, const std::filesystem::path& path) {
  std::string csv = "event_index,t_j,gap,T_ref\n";
  for (std::size_t k = 0; k < sol.inter_event_gaps.size(); ++k)
    write_csv_row(csv, {std::to_string(k + 1), io::fmt17(sol.jump_times[sol.gap_jumps[k] - 1]),
                        io::fmt17(sol.inter_event_gaps[k]), io::fmt17(T_ref)});
  io::write_file(path, csv);
}

namespace {

struct Flags {
  std::string config;
  std::string system;
  std::string output_dir;
  std::string mode;
  double gamma = 0.0;
  double L = 0.0;
  double T = 0.0;
  double sigma = 0.0;
  double horizon = 0.0;
  double step = 0.0;
  double radius = 0.0;
  std::size_t runs = 0;
  std::size_t workers = 0;
  std::size_t samples = 10000;
  std::string seed;
};

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& help, Flags& flags)
      : sub_(app.add_subcommand(name, help)), flags_(flags) {}

  template <class T>
  Command& opt(const std::string& name, T& var, const std::string& help) {
    opts_[name] = sub_->add_option(name, var, help);
    return *this;
  }
  Command& common() {
    opt("--config", flags_.config, "JSON run configuration");
    opt("--system", flags_.system, "lorenz | lti-sf-tabuada | lti-custom");
    opt("--gamma", flags_.gamma, "override the certificate gain gamma");
    return *this;
  }
  Command& trigger() {
    opt("--mode", flags_.mode, "output-feedback | state-feedback | pure-event | periodic");
    opt("--T", flags_.T, "dwell time");
    opt("--sigma", flags_.sigma, "state-feedback threshold factor");
    opt("--horizon", flags_.horizon, "simulated time");
    opt("--step", flags_.step, "integration step");
    return *this;
  }
  [[nodiscard]] bool given(const std::string& name) const {
    auto it = opts_.find(name);
    return it != opts_.end() && it->second->count() > 0;
  }
  [[nodiscard]] bool parsed() const { return sub_->parsed(); }

 private:
  CLI::App* sub_;
  Flags& flags_;
  std::map<std::string, CLI::Option*> opts_;
};

RunConfig build_config(const Command& cmd, const Flags& f) {
  RunConfig cfg = defaults_for(RunConfig{}.system);
  if (cmd.given("--config")) {
    cfg = load_config_file(f.config);
    if (cmd.given("--system")) cfg.system = f.system;
  } else if (cmd.given("--system")) {
    cfg = defaults_for(f.system);
  }
  if (cmd.given("--gamma")) cfg.gamma = f.gamma;
  if (cmd.given("--mode")) cfg.trigger.mode = parse_trigger_mode(f.mode);
  if (cmd.given("--T")) cfg.trigger.T = f.T;
  if (cmd.given("--sigma")) cfg.trigger.sigma = f.sigma;
  if (cmd.given("--horizon")) cfg.sim.horizon_t = f.horizon;
  if (cmd.given("--step")) cfg.sim.step = f.step;
  if (cmd.given("--runs")) cfg.n_runs = f.runs;
  if (cmd.given("--radius")) cfg.radius = f.radius;
  if (cmd.given("--workers")) cfg.workers = f.workers;
  if (cmd.given("--output-dir")) cfg.output_dir = f.output_dir;
  if (const char* env = std::getenv("ETC_LAB_SEED")) cfg.seed = parse_seed(env, "ETC_LAB_SEED");
  if (cmd.given("--seed")) cfg.seed = parse_seed(f.seed, "--seed");
  return cfg;
}

std::string stat(const std::optional<double>& v) { return v ? io::fmt4(*v) : "n/a"; }

int run_masp(const Command& cmd, const Flags& f, std::ostream& out) {
  if (cmd.given("--L") && !cmd.given("--gamma")) throw ConfigError("masp: --L needs --gamma");
  if (cmd.given("--gamma") && cmd.given("--L")) {
    out << io::fmt4(masp(f.gamma, f.L)) << "\n";
    return 0;
  }
  const RunConfig cfg = build_config(cmd, f);
  if (cfg.certificate.kind == CertificateSpec::Kind::Gains) {
    out << io::fmt4(masp(cfg.gamma.value_or(cfg.certificate.gamma), cfg.certificate.L)) << "\n";
    return 0;
  }
  const ResolvedLoop loop = resolve(cfg);
  out << io::fmt4(masp(loop.cert.gamma, loop.cert.L)) << "\n";
  return 0;
}

int run_design(const Command& cmd, const Flags& f, std::ostream& out) {
  const RunConfig cfg = build_config(cmd, f);
  const ResolvedLoop loop = resolve(cfg);
  const json cert = certificate_json(loop);
  io::ensure_directory(cfg.output_dir);
  const auto path = std::filesystem::path(cfg.output_dir) / "certificate.json";
  io::write_file(path, io::dump_json(cert) + "\n");
  out << "gamma " << io::fmt4(loop.cert.gamma) << "  L " << io::fmt4(loop.cert.L) << "  T_max "
      << io::fmt4(cert.at("T_max").get<double>()) << "\n"
      << "wrote " << path.string() << "\n";
  return 0;
}

int run_check(const Command& cmd, const Flags& f, std::ostream& out) {
  const RunConfig cfg = build_config(cmd, f);
  const ResolvedLoop loop = resolve(cfg);
  const double radius = cmd.given("--radius") ? f.radius : 50.0;
  if (!(radius > 0.0)) throw ConfigError("check: --radius must be positive");
  const AssumptionReport rep = check_assumption_sampled(loop.sys, loop.cert, f.samples, radius, cfg.seed);
  auto line = [&](const char* name, const InequalityCheck& c) {
    out << name << "  max_violation " << io::fmt17(c.max_violation) << "  checked " << c.checked << "  skipped "
        << c.skipped << "  " << (c.pass(rep.tolerance) ? "ok" : "VIOLATED") << "\n";
  };
  line("bounds", rep.bounds);
  line("v_dot ", rep.v_dot);
  line("w_dot ", rep.w_dot);
  out << (rep.pass() ? "PASS" : "FAIL") << "\n";
  return rep.pass() ? 0 : 1;
}

int run_simulate(const Command& cmd, const Flags& f, std::ostream& out) {
  const RunConfig cfg = build_config(cmd, f);
  const ResolvedLoop loop = resolve(cfg);
  validate(cfg.trigger, loop.cert);
  validate(cfg.sim, cfg.trigger);
  const ZetaParams zp = zeta_params(cfg, loop.cert);
  if (cfg.trigger.T > 0.0) {
    const double zt = zeta_time(loop.cert.gamma, loop.cert.L, zp, 1e-4);
    if (!(cfg.trigger.T < zt))
      throw ConfigError("dwell time T = " + io::fmt17(cfg.trigger.T) + " is not below zeta_time(theta, eta) = " +
                        io::fmt17(zt) + "; lower zeta.theta/zeta.eta or T");
  }

  HybridState q0;
  if (cfg.initial) {
    q0 = *cfg.initial;
  } else {
    BatchSpec spec = batch_spec(cfg);
    validate(spec);
    q0 = sample_initial(spec, loop.sys.n_x, loop.sys.n_e, 0);
  }
  SimSettings sim = cfg.sim;
  sim.record_states = true;

  const std::filesystem::path dir(cfg.output_dir);
  HybridSolution sol;
  try {
    sol = simulate(loop.sys, loop.cert, cfg.trigger, q0, sim);
  } catch (const DivergenceError& ex) {
    io::ensure_directory(dir);
    if (!ex.partial().segments.empty()) write_states_csv(ex.partial(), dir / "states.csv");
    throw;
  }
  const auto r = r_monitor(sol, loop.cert, zp);

  io::ensure_directory(dir);
  write_states_csv(sol, dir / "states.csv");
  write_events_csv(sol, dir / "events.csv");
  write_r_csv(r, dir / "r_monitor.csv");
  emit_plot_data(sol, cfg.trigger.T, dir / "plot.csv");

  const BatchReport stats = aggregate({sol});
  const double r0 = r.front().R;
  out << "events " << stats.n_events_total << "  tau_min " << stat(stats.tau_min) << "  tau_avg "
      << stat(stats.tau_avg) << "\n"
      << "|x(0)| " << io::fmt17(norm(q0.x)) << "  |x(end)| " << io::fmt17(norm(sol.final_sample().q.x)) << "\n"
      << "max R increase / R(0) " << io::fmt17(r0 > 0.0 ? max_r_increase(r) / r0 : max_r_increase(r)) << "\n"
      << "wrote " << dir.string() << "/{states,events,r_monitor,plot}.csv\n";
  return 0;
}

int run_batch_cmd(const Command& cmd, const Flags& f, std::ostream& out) {
  const RunConfig cfg = build_config(cmd, f);
  const ResolvedLoop loop = resolve(cfg);
  const BatchSpec spec = batch_spec(cfg);
  validate(spec);
  validate(spec.trigger, loop.cert);
  const BatchReport rep = run_batch(loop.sys, loop.cert, spec);
  const ReportFiles files = emit_report(rep, cfg.output_dir);
  out << "runs " << rep.n_runs << "  events " << rep.n_events_total << "  tau_min " << stat(rep.tau_min)
      << "  tau_avg " << stat(rep.tau_avg) << "  failures " << rep.failures.size() << "\n"
      << "wrote " << files.summary.string() << " and " << files.events.string() << "\n";
  return rep.failures.empty() ? 0 : 2;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-triggered control with an enforced dwell time", "etc-lab"};
  app.require_subcommand(1, 1);
  Flags f;

  Command masp_cmd(app, "masp", "print the dwell-time bound T(gamma, L)", f);
  masp_cmd.common().opt("--L", f.L, "certificate gain L");

  Command design_cmd(app, "design", "design an LMI certificate and write certificate.json", f);
  design_cmd.common().opt("--output-dir", f.output_dir, "artifact directory");

  Command check_cmd(app, "check", "sampled check of the certificate inequalities", f);
  check_cmd.common()
      .opt("--samples", f.samples, "number of samples (default 10000)")
      .opt("--radius", f.radius, "sampling radius (default 50)")
      .opt("--seed", f.seed, "RNG seed");

  Command sim_cmd(app, "simulate", "simulate one solution and write trajectory, events, R and plot data", f);
  sim_cmd.common().trigger().opt("--output-dir", f.output_dir, "artifact directory").opt("--seed", f.seed, "RNG seed");

  Command batch_cmd(app, "batch", "Monte Carlo batch of initial conditions", f);
  batch_cmd.common()
      .trigger()
      .opt("--output-dir", f.output_dir, "artifact directory")
      .opt("--seed", f.seed, "RNG seed")
      .opt("--runs", f.runs, "number of initial conditions")
      .opt("--radius", f.radius, "initial-condition ball radius")
      .opt("--workers", f.workers, "worker threads");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (masp_cmd.parsed()) return run_masp(masp_cmd, f, out);
    if (design_cmd.parsed()) return run_design(design_cmd, f, out);
    if (check_cmd.parsed()) return run_check(check_cmd, f, out);
    if (sim_cmd.parsed()) return run_simulate(sim_cmd, f, out);
    return run_batch_cmd(batch_cmd, f, out);
  } catch (const DivergenceError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace etc::cli
