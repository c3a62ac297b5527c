// Run configuration: JSON file sections, dotted-key overrides, validation.
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmpm/control/optimize.hpp"
#include "dmpm/mppi/mppi.hpp"
#include "dmpm/scenarios/beam.hpp"
#include "dmpm/scenarios/rope.hpp"

namespace dmpm {

using Json = nlohmann::ordered_json;

enum class ScenarioKind { kRope, kBeam };

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::kRope;
  RopeConfig rope;
  BeamConfig beam;

  /// Explicit time step; must divide the control hold for the rope.
  std::optional<double> dt;
  /// Simulated duration for `simulate` and `energy-test`; defaults per scenario.
  std::optional<double> duration;
  long record_every = 10;
  StepScheme scheme = StepScheme::kRK4;

  OptimizerConfig optimizer;
  MPPIConfig mppi;

  std::string output_directory = ".";
  std::string output_prefix = "";

  int gradcheck_states = 5;
  double gradcheck_delta = 1e-9;
  FdPrecision gradcheck_precision = FdPrecision::kExtended;
  bool gradcheck_fine_step = true;
  std::uint64_t gradcheck_seed = 1;

  double resolved_duration() const {
    if (duration) return *duration;
    return scenario == ScenarioKind::kRope ? rope.horizon : 10.0;
  }
};

namespace detail {

inline const char* scheme_name(StepScheme s) {
  switch (s) {
    case StepScheme::kRK4:
      return "rk4";
    case StepScheme::kEuler:
      return "euler";
    case StepScheme::kFlipUSL:
      return "flip";
  }
  return "rk4";
}

inline StepScheme parse_scheme(const std::string& s) {
  if (s == "rk4") return StepScheme::kRK4;
  if (s == "euler") return StepScheme::kEuler;
  if (s == "flip") return StepScheme::kFlipUSL;
  throw ConfigError("time.scheme: expected rk4, euler or flip, got '" + s + "'");
}

template <typename T>
T get_as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

// Reads the keys of one section, rejecting any key not consumed.
class SectionReader {
 public:
  SectionReader(const Json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    section_ = &root.at(name_);
    if (!section_->is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    known_.emplace_back(key);
    if (section_ == nullptr || !section_->contains(key)) return;
    out = get_as<T>(section_->at(key), name_ + "." + key);
  }

  template <typename T>
  void read_optional(const char* key, std::optional<T>& out) {
    known_.emplace_back(key);
    if (section_ == nullptr || !section_->contains(key)) return;
    const Json& v = section_->at(key);
    if (v.is_null()) {
      out.reset();
    } else {
      out = get_as<T>(v, name_ + "." + key);
    }
  }

  void read_vec2(const char* key, Vec2d& out) {
    known_.emplace_back(key);
    if (section_ == nullptr || !section_->contains(key)) return;
    const auto v = get_as<std::vector<double>>(section_->at(key), name_ + "." + key);
    if (v.size() != 2) throw ConfigError("config key '" + name_ + "." + key + "' needs 2 values");
    out = Vec2d(v[0], v[1]);
  }

  void finish() const {
    if (section_ == nullptr) return;
    for (auto it = section_->begin(); it != section_->end(); ++it) {
      bool found = false;
      for (const auto& k : known_) found = found || k == it.key();
      if (!found) throw ConfigError("unknown config key '" + name_ + "." + it.key() + "'");
    }
  }

 private:
  std::string name_;
  const Json* section_ = nullptr;
  std::vector<std::string> known_;
};

}  // namespace detail

inline RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  static const char* kSections[] = {"scenario", "material", "grid",     "time",
                                    "optimizer", "mppi",    "gradcheck", "output"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* s : kSections) ok = ok || it.key() == s;
    if (!ok) throw ConfigError("unknown config section '" + it.key() + "'");
  }
  RunConfig c;
  RopeConfig& r = c.rope;
  BeamConfig& b = c.beam;

  {
    detail::SectionReader s(j, "scenario");
    std::string type = "rope";
    s.read("type", type);
    if (type == "rope") {
      c.scenario = ScenarioKind::kRope;
    } else if (type == "beam") {
      c.scenario = ScenarioKind::kBeam;
    } else {
      throw ConfigError("scenario.type: expected rope or beam, got '" + type + "'");
    }
    // Geometry applies to whichever scenario is selected.
    double length = c.scenario == ScenarioKind::kRope ? r.length : b.length;
    double thickness = c.scenario == ScenarioKind::kRope ? r.thickness : b.height;
    int ppc = c.scenario == ScenarioKind::kRope ? r.particles_per_cell : b.particles_per_cell;
    s.read("length", length);
    s.read("thickness", thickness);
    s.read("particles_per_cell", ppc);
    // Shared keys go to the selected scenario only; the other keeps its defaults.
    if (c.scenario == ScenarioKind::kRope) {
      r.length = length;
      r.thickness = thickness;
      r.particles_per_cell = ppc;
    } else {
      b.length = length;
      b.height = thickness;
      b.particles_per_cell = ppc;
    }
    s.read_vec2("gravity", r.gravity);
    s.read("hold", r.hold);
    s.read("horizon", r.horizon);
    s.read("disturbance_amplitude", r.disturbance_amplitude);
    s.read("disturbance_duration", r.disturbance_duration);
    s.read("relax_duration", r.relax_duration);
    s.read("relax_drag", r.relax_drag);
    s.read("relax_energy_tol", r.relax_energy_tol);
    s.read("velocity_amplitude", b.amplitude);
    s.finish();
  }
  {
    detail::SectionReader s(j, "material");
    const bool beam = c.scenario == ScenarioKind::kBeam;
    double E = beam ? b.youngs_modulus : r.youngs_modulus;
    double nu = beam ? b.poisson_ratio : r.poisson_ratio;
    double rho = beam ? b.density : r.density;
    s.read("E", E);
    s.read("nu", nu);
    s.read("rho0", rho);
    double ld = beam ? b.lambda_d : r.lambda_d;
    double md = beam ? b.mu_d : r.mu_d;
    s.read("lambda_d", ld);
    s.read("mu_d", md);
    s.finish();
    if (beam) {
      b.lambda_d = ld;
      b.mu_d = md;
      b.youngs_modulus = E;
      b.poisson_ratio = nu;
      b.density = rho;
    } else {
      r.lambda_d = ld;
      r.mu_d = md;
      r.youngs_modulus = E;
      r.poisson_ratio = nu;
      r.density = rho;
    }
  }
  {
    detail::SectionReader s(j, "grid");
    double h = c.scenario == ScenarioKind::kRope ? r.h : b.h;
    s.read("h", h);
    (c.scenario == ScenarioKind::kRope ? r.h : b.h) = h;
    // Free space around the body, m: [side, below, above].
    std::vector<double> ext{r.clearance_side, r.clearance_below, r.clearance_above};
    if (c.scenario == ScenarioKind::kBeam) ext = {b.clearance, b.clearance, b.clearance};
    s.read("extents", ext);
    if (ext.size() != 3) throw ConfigError("grid.extents needs 3 values [side, below, above]");
    if (c.scenario == ScenarioKind::kRope) {
      r.clearance_side = ext[0];
      r.clearance_below = ext[1];
      r.clearance_above = ext[2];
    } else {
      b.clearance = std::min({ext[0], ext[1], ext[2]});
    }
    s.finish();
  }
  {
    detail::SectionReader s(j, "time");
    double cfl = c.scenario == ScenarioKind::kRope ? r.cfl : b.cfl;
    s.read("cfl", cfl);
    (c.scenario == ScenarioKind::kRope ? r.cfl : b.cfl) = cfl;
    s.read_optional("dt", c.dt);
    s.read_optional("duration", c.duration);
    s.read("record_every", c.record_every);
    std::string scheme = detail::scheme_name(c.scheme);
    s.read("scheme", scheme);
    c.scheme = detail::parse_scheme(scheme);
    s.finish();
  }
  {
    detail::SectionReader s(j, "optimizer");
    OptimizerConfig& o = c.optimizer;
    s.read("lr", o.adam.lr);
    s.read("beta1", o.adam.beta1);
    s.read("beta2", o.adam.beta2);
    s.read("eps", o.adam.eps);
    s.read("iterations", o.iterations);
    s.read("window", o.window_controls);
    s.read("seed", o.seed);
    s.read("init_range", o.init_range);
    s.read_optional("clamp", o.clamp);
    s.finish();
  }
  {
    detail::SectionReader s(j, "mppi");
    MPPIConfig& m = c.mppi;
    s.read("K", m.samples);
    s.read("H", m.horizon);
    s.read("sigma", m.variance);
    s.read_optional("beta", m.beta);
    s.read_optional("eta_min", m.eta_min);
    s.read_optional("eta_max", m.eta_max);
    s.read("beta_factor", m.beta_factor);
    s.read("search_iterations", m.max_search_iterations);
    s.read("seed", m.seed);
    s.read("failure_penalty", m.failure_penalty);
    s.finish();
  }
  {
    detail::SectionReader s(j, "gradcheck");
    s.read("states", c.gradcheck_states);
    s.read("delta", c.gradcheck_delta);
    std::string precision = c.gradcheck_precision == FdPrecision::kExtended ? "extended" : "double";
    s.read("precision", precision);
    if (precision == "extended") {
      c.gradcheck_precision = FdPrecision::kExtended;
    } else if (precision == "double") {
      c.gradcheck_precision = FdPrecision::kDouble;
    } else {
      throw ConfigError("gradcheck.precision: expected extended or double, got '" + precision + "'");
    }
    s.read("fine_step", c.gradcheck_fine_step);
    s.read("seed", c.gradcheck_seed);
    s.finish();
  }
  {
    detail::SectionReader s(j, "output");
    s.read("directory", c.output_directory);
    s.read("prefix", c.output_prefix);
    s.finish();
  }
  c.optimizer.record_every = c.record_every;
  c.mppi.record_every = c.record_every;
  if (c.record_every < 1) throw ConfigError("time.record_every must be at least 1");
  return c;
}

/// Fully resolved configuration, every key present.
inline Json config_to_json(const RunConfig& c) {
  const bool rope = c.scenario == ScenarioKind::kRope;
  const RopeConfig& r = c.rope;
  const BeamConfig& b = c.beam;
  Json j;
  j["scenario"] = {{"type", rope ? "rope" : "beam"},
                   {"length", rope ? r.length : b.length},
                   {"thickness", rope ? r.thickness : b.height},
                   {"particles_per_cell", rope ? r.particles_per_cell : b.particles_per_cell},
                   {"gravity", {r.gravity.x, r.gravity.y}},
                   {"hold", r.hold},
                   {"horizon", r.horizon},
                   {"disturbance_amplitude", r.disturbance_amplitude},
                   {"disturbance_duration", r.disturbance_duration},
                   {"relax_duration", r.relax_duration},
                   {"relax_drag", r.relax_drag},
                   {"relax_energy_tol", r.relax_energy_tol},
                   {"velocity_amplitude", b.amplitude}};
  j["material"] = {{"E", rope ? r.youngs_modulus : b.youngs_modulus},
                   {"nu", rope ? r.poisson_ratio : b.poisson_ratio},
                   {"rho0", rope ? r.density : b.density},
                   {"lambda_d", rope ? r.lambda_d : b.lambda_d},
                   {"mu_d", rope ? r.mu_d : b.mu_d}};
  Json ext = rope ? Json::array({r.clearance_side, r.clearance_below, r.clearance_above})
                  : Json::array({b.clearance, b.clearance, b.clearance});
  j["grid"] = {{"h", rope ? r.h : b.h}, {"extents", ext}};
  j["time"] = {{"cfl", rope ? r.cfl : b.cfl},
               {"dt", c.dt ? Json(*c.dt) : Json(nullptr)},
               {"duration", c.resolved_duration()},
               {"record_every", c.record_every},
               {"scheme", detail::scheme_name(c.scheme)}};
  const OptimizerConfig& o = c.optimizer;
  j["optimizer"] = {{"lr", o.adam.lr},
                    {"beta1", o.adam.beta1},
                    {"beta2", o.adam.beta2},
                    {"eps", o.adam.eps},
                    {"iterations", o.iterations},
                    {"window", o.window_controls},
                    {"seed", o.seed},
                    {"init_range", o.init_range},
                    {"clamp", o.clamp ? Json(*o.clamp) : Json(nullptr)}};
  const MPPIConfig& m = c.mppi;
  j["mppi"] = {{"K", m.samples},
               {"H", m.horizon},
               {"sigma", m.variance},
               {"beta", m.beta ? Json(*m.beta) : Json(nullptr)},
               {"eta_min", m.resolved_eta_min()},
               {"eta_max", m.resolved_eta_max()},
               {"beta_factor", m.beta_factor},
               {"search_iterations", m.max_search_iterations},
               {"seed", m.seed},
               {"failure_penalty", m.failure_penalty}};
  j["gradcheck"] = {{"states", c.gradcheck_states},
                    {"delta", c.gradcheck_delta},
                    {"precision", c.gradcheck_precision == FdPrecision::kExtended ? "extended"
                                                                                  : "double"},
                    {"fine_step", c.gradcheck_fine_step},
                    {"seed", c.gradcheck_seed}};
  j["output"] = {{"directory", c.output_directory}, {"prefix", c.output_prefix}};
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Applies "section.key=value"; the value is parsed as JSON, or taken as a
/// string if that fails.
inline void apply_override(Json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  const std::string raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  if (!j.contains(section)) j[section] = Json::object();
  j[section][key] = value;
}

inline RunConfig load_config(const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides) {
  Json j = path ? read_json_file(*path) : Json::object();
  for (const auto& o : overrides) apply_override(j, o);
  return config_from_json(j);
}

/// Rope scenario with the configured time step applied before relaxation.
inline RopeScenario make_rope(const RunConfig& c) {
  RopeScenario sc = build_rope_unrelaxed(c.rope);
  if (c.dt) {
    const long n = std::lround(c.rope.hold / *c.dt);
    if (n < 1 || std::abs(n * *c.dt - c.rope.hold) > 1e-9 * c.rope.hold)
      throw ConfigError("time.dt must divide the control hold interval");
    sc.steps_per_hold = n;
    sc.dt = c.rope.hold / static_cast<double>(n);
  }
  RelaxResult rr = relax_to_steady(sc.state, sc.model, sc.dt, c.rope.relax_duration,
                                   c.rope.relax_drag, c.rope.relax_energy_tol);
  sc.state = std::move(rr.state);
  sc.settled = rr.settled;
  return sc;
}

inline BeamScenario make_beam(const RunConfig& c) {
  BeamScenario sc = build_beam(c.beam);
  if (c.dt) sc.dt = *c.dt;
  return sc;
}

}  // namespace dmpm
