// Command-line driver: subcommands simulate, energy-test, optimize, mppi,
// gradcheck and metrics.
#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmpm/grad/gradcheck.hpp"
#include "dmpm/io/config.hpp"
#include "dmpm/io/csv.hpp"
#include "dmpm/io/metrics.hpp"

namespace dmpm {

namespace cli {

struct Context {
  RunConfig config;
  std::filesystem::path dir;
  std::ostream* out = &std::cout;

  std::string path(const std::string& name) const {
    return (dir / (config.output_prefix + name)).string();
  }
};

inline Json metrics_json(const DampingMetrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"peak_e_kin_J", m.peak},
          {"threshold_80_J", m.threshold_80},
          {"threshold_90_J", m.threshold_90},
          {"t_80_s", opt(m.t_80)},
          {"t_90_s", opt(m.t_90)},
          {"mean_e_kin_1_2_J", m.mean_window},
          {"mean_window_samples", m.window_samples}};
}

inline std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream s;
  s << std::setprecision(6) << *v * 1e3 << " ms";
  return s.str();
}

inline void print_metrics(std::ostream& os, const std::string& label, const DampingMetrics& m) {
  os << label << ": peak " << m.peak << " J, t_80 " << fmt_opt(m.t_80) << ", t_90 "
     << fmt_opt(m.t_90) << ", mean E_kin [1,2] s " << m.mean_window << " J\n";
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os << j.dump(2) << '\n';
}

inline DampingMetrics record_metrics(const RolloutRecord& r, double disturbance_end) {
  return compute_metrics(r.time, r.e_kin, disturbance_end);
}

/// Disturbance followed by zero control up to t_end.
inline ControlSequence no_action_sequence(const RopeScenario& sc, double t_end) {
  const long n = std::max(0L, std::lround((t_end - sc.disturbance_end()) / sc.config.hold));
  return ControlSequence::Concatenate(
      sc.disturbance, post_disturbance_sequence(sc, std::vector<double>(std::size_t(n), 0.0)));
}

inline double relative_drift(const std::vector<double>& e) {
  return e.empty() || e.front() == 0.0 ? 0.0 : (e.back() - e.front()) / e.front();
}

inline int cmd_simulate(Context& ctx) {
  const RunConfig& c = ctx.config;
  std::ostream& os = *ctx.out;
  RolloutRecord rec;
  RolloutOptions opt;
  opt.t1 = c.resolved_duration();
  opt.record_every = c.record_every;
  opt.scheme = c.scheme;
  if (c.scenario == ScenarioKind::kRope) {
    const RopeScenario sc = make_rope(c);
    if (c.scheme != StepScheme::kRK4) throw ConfigError("rope rollouts use time.scheme = rk4");
    const ControlSequence u = no_action_sequence(sc, opt.t1);
    opt.dt = sc.dt;
    rec = rollout(sc.state, sc.model, &u, opt);
    os << "rope: " << sc.state.size() << " particles, dt " << sc.dt << " s, "
       << (sc.settled ? "relaxed" : "relaxation did not settle") << '\n';
    const DampingMetrics m = record_metrics(rec, sc.disturbance_end());
    print_metrics(os, "no action", m);
  } else {
    const BeamScenario sc = make_beam(c);
    opt.dt = sc.dt;
    rec = rollout(sc.state, sc.model, nullptr, opt);
    os << "beam: " << sc.state.size() << " particles, dt " << sc.dt << " s, total energy drift "
       << 100.0 * relative_drift(rec.e_total) << " %\n";
  }
  const std::string path = ctx.path("simulate_energy.csv");
  write_energy_csv(path, EnergyTable::From(rec));
  os << "wrote " << path << '\n';
  return 0;
}

inline int cmd_energy_test(Context& ctx) {
  RunConfig c = ctx.config;
  std::ostream& os = *ctx.out;
  c.scenario = ScenarioKind::kBeam;
  const BeamScenario sc = make_beam(c);
  RolloutOptions opt;
  opt.t1 = c.resolved_duration();
  opt.dt = sc.dt;
  opt.record_every = c.record_every;
  opt.scheme = StepScheme::kRK4;
  os << "beam: " << sc.state.size() << " particles, dt " << sc.dt << " s, duration " << opt.t1
     << " s\n";
  const RolloutRecord ours = rollout(sc.state, sc.model, nullptr, opt);
  opt.dt = sc.dt / 4.0;
  opt.record_every = 4 * c.record_every;
  opt.scheme = StepScheme::kFlipUSL;
  const RolloutRecord flip = rollout(sc.state, sc.model, nullptr, opt);
  const std::string p1 = ctx.path("energy_rk4.csv"), p2 = ctx.path("energy_flip.csv");
  write_energy_csv(p1, EnergyTable::From(ours));
  write_energy_csv(p2, EnergyTable::From(flip));
  const double d1 = relative_drift(ours.e_total), d2 = relative_drift(flip.e_total);
  os << std::setprecision(6) << "rk4 total energy drift " << 100.0 * d1 << " %\n"
     << "flip (dt/4) total energy drift " << 100.0 * d2 << " %\n";
  write_json(ctx.path("energy_summary.json"),
             {{"particles", sc.state.size()},
              {"dt_s", sc.dt},
              {"duration_s", opt.t1},
              {"rk4_relative_drift", d1},
              {"flip_relative_drift", d2},
              {"rk4_csv", p1},
              {"flip_csv", p2}});
  os << "wrote " << p1 << ", " << p2 << '\n';
  return 0;
}

inline RopeScenario rope_for(const Context& ctx) {
  if (ctx.config.scenario != ScenarioKind::kRope)
    throw ConfigError("this subcommand needs scenario.type = rope");
  return make_rope(ctx.config);
}

inline Json controls_json(const ControlSequence& s) {
  return {{"t_start_s", s.t_start}, {"hold_s", s.hold}, {"values_m_per_s", s.values}};
}

inline int cmd_optimize(Context& ctx) {
  std::ostream& os = *ctx.out;
  const RopeScenario sc = rope_for(ctx);
  const OptimizerConfig& oc = ctx.config.optimizer;
  os << "optimize: seed " << oc.seed << ", " << sc.control_steps() << " controls in windows of "
     << oc.window_controls << ", " << oc.iterations << " Adam iterations each\n";
  const auto t0 = std::chrono::steady_clock::now();
  const OptimizationRun run = optimize_trajectory(sc, oc);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const RolloutRecord none =
      rope_rollout(sc, no_action_sequence(sc, sc.config.horizon), oc.record_every);

  write_energy_csv(ctx.path("optimize_energy.csv"), EnergyTable::From(run.optimized_record));
  write_energy_csv(ctx.path("optimize_initial_energy.csv"), EnergyTable::From(run.initial_record));
  write_energy_csv(ctx.path("no_action_energy.csv"), EnergyTable::From(none));
  write_controls_csv(ctx.path("optimize_controls.csv"), run.optimized_full);

  const double te = sc.disturbance_end();
  const DampingMetrics m_opt = record_metrics(run.optimized_record, te);
  const DampingMetrics m_init = record_metrics(run.initial_record, te);
  const DampingMetrics m_none = record_metrics(none, te);
  Json windows = Json::array();
  for (const WindowOptimization& w : run.windows)
    windows.push_back({{"theta0", w.theta0},
                       {"theta", w.theta},
                       {"initial_cost", w.cost_trace.empty() ? w.best_cost : w.cost_trace.front()},
                       {"best_cost", w.best_cost},
                       {"best_iteration", w.best_iteration}});
  write_json(ctx.path("optimize_summary.json"),
             {{"seed", run.seed},
              {"dt_s", sc.dt},
              {"disturbance_end_s", te},
              {"optimized", metrics_json(m_opt)},
              {"initial_guess", metrics_json(m_init)},
              {"no_action", metrics_json(m_none)},
              {"controls", controls_json(run.optimized)},
              {"windows", windows}});
  print_metrics(os, "no action", m_none);
  print_metrics(os, "initial guess", m_init);
  print_metrics(os, "optimized", m_opt);
  os << "reduction of mean E_kin vs no action "
     << 100.0 * (1.0 - m_opt.mean_window / m_none.mean_window) << " %, wall " << wall << " s\n";
  return 0;
}

inline int cmd_mppi(Context& ctx) {
  std::ostream& os = *ctx.out;
  const RopeScenario sc = rope_for(ctx);
  const MPPIConfig& mc = ctx.config.mppi;
  os << "mppi: seed " << mc.seed << ", K " << mc.samples << ", H " << mc.horizon << ", sigma "
     << mc.variance << '\n';
  const auto t0 = std::chrono::steady_clock::now();
  const MPPIRun run = receding_horizon_control(sc, mc);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_energy_csv(ctx.path("mppi_energy.csv"), EnergyTable::From(run.record));
  write_controls_csv(ctx.path("mppi_controls.csv"), run.applied_full);
  const DampingMetrics m = record_metrics(run.record, sc.disturbance_end());
  Json steps = Json::array();
  int failed = 0, fallbacks = 0;
  for (const MPPIStepInfo& s : run.steps) {
    failed += s.failed_samples;
    fallbacks += s.fallback ? 1 : 0;
    steps.push_back({{"time_s", s.time},
                     {"applied_m_per_s", s.applied},
                     {"beta", s.beta},
                     {"eta", s.eta},
                     {"search_iterations", s.search_iterations},
                     {"fallback", s.fallback},
                     {"failed_samples", s.failed_samples},
                     {"best_cost", s.best_cost}});
  }
  write_json(ctx.path("mppi_summary.json"), {{"seed", run.seed},
                                             {"dt_s", sc.dt},
                                             {"disturbance_end_s", sc.disturbance_end()},
                                             {"metrics", metrics_json(m)},
                                             {"failed_samples", failed},
                                             {"beta_fallbacks", fallbacks},
                                             {"controls", controls_json(run.applied)},
                                             {"steps", steps}});
  print_metrics(os, "mppi", m);
  os << "failed samples " << failed << ", wall " << wall << " s\n";
  return 0;
}

inline int cmd_gradcheck(Context& ctx) {
  std::ostream& os = *ctx.out;
  const RopeScenario sc = rope_for(ctx);
  const RunConfig& c = ctx.config;
  const int n = c.optimizer.window_controls;
  const WindowSpec w = rope_window(sc, n);
  const auto cases =
      random_window_cases(sc, c.gradcheck_states, n, c.optimizer.init_range, c.gradcheck_seed);
  GradcheckOptions go;
  go.delta = c.gradcheck_delta;
  go.precision = c.gradcheck_precision;
  go.fine_step = c.gradcheck_fine_step;
  constexpr double kTol = 1e-4;
  double worst = 0.0, worst_fine = 0.0;
  Json reports = Json::array();
  os << "finite differences: delta " << go.delta << ", "
     << (go.precision == FdPrecision::kExtended ? "extended" : "double") << " precision\n";
  for (const WindowCase& wc : cases) {
    const GradientReport rep = check_gradient(wc.state, wc.theta, w, sc.model, go);
    worst = std::max(worst, rep.max_rel_error);
    worst_fine = std::max(worst_fine, rep.max_rel_error_fine);
    os << std::setprecision(10) << "window at t = " << wc.t_start << " s, cost " << rep.cost
       << '\n'
       << "   i            grad       fd(delta)    rel_err";
    if (go.fine_step) os << "    fd(delta/10)    rel_err";
    os << '\n';
    for (std::size_t i = 0; i < rep.grad.size(); ++i) {
      os << "  " << std::setw(2) << i << std::setprecision(10) << std::setw(16) << rep.grad[i]
         << std::setw(16) << rep.fd[i] << std::setprecision(3) << std::setw(11)
         << rep.rel_error[i];
      if (go.fine_step)
        os << std::setprecision(10) << std::setw(16) << rep.fd_fine[i] << std::setprecision(3)
           << std::setw(11) << rep.rel_error_fine[i];
      os << '\n';
    }
    os << std::setprecision(3) << "  max rel error " << rep.max_rel_error;
    if (go.fine_step) os << ", " << rep.max_rel_error_fine << " at delta/10";
    os << '\n';
    Json r = {{"t_start_s", wc.t_start}, {"theta", wc.theta},         {"cost", rep.cost},
              {"grad", rep.grad},        {"fd", rep.fd},              {"rel_error", rep.rel_error},
              {"max_rel_error", rep.max_rel_error}};
    if (go.fine_step) {
      r["fd_fine"] = rep.fd_fine;
      r["rel_error_fine"] = rep.rel_error_fine;
      r["max_rel_error_fine"] = rep.max_rel_error_fine;
    }
    reports.push_back(std::move(r));
  }
  const bool pass = worst <= kTol;
  Json summary = {{"seed", c.gradcheck_seed},
                  {"delta", go.delta},
                  {"precision", go.precision == FdPrecision::kExtended ? "extended" : "double"},
                  {"tolerance", kTol},
                  {"max_rel_error", worst},
                  {"pass", pass},
                  {"windows", reports}};
  if (go.fine_step) summary["max_rel_error_fine"] = worst_fine;
  write_json(ctx.path("gradcheck.json"), summary);
  os << "gradcheck: max rel error " << worst << " over " << cases.size() << " windows: "
     << (pass ? "PASS" : "FAIL") << " (tolerance " << kTol << ")\n";
  return 0;
}

inline int cmd_metrics(Context& ctx, const std::string& csv, std::optional<double> t_end) {
  std::ostream& os = *ctx.out;
  const EnergyTable t = read_energy_csv(csv);
  const double te = t_end.value_or(ctx.config.rope.disturbance_duration);
  const DampingMetrics m = compute_metrics(t.time, t.e_kin, te);
  os << std::setprecision(17) << metrics_json(m).dump(2) << '\n';
  return 0;
}

}  // namespace cli

/// Entry point of the dmpm command-line tool. Returns the process exit status.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Differentiable MPM simulator and controllers", "dmpm"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  app.add_option("-c,--config", config_path, "JSON run configuration");
  app.add_option("-s,--set", overrides, "override, section.key=value (repeatable)")
      ->take_all()
      ->allow_extra_args(false);
  app.add_option("-o,--out", out_dir, "output directory (overrides output.directory)");

  auto* sim = app.add_subcommand("simulate", "plain rollout of the configured scenario");
  auto* energy = app.add_subcommand("energy-test", "beam energy: RK4 vs FLIP USL at dt/4");
  auto* opt = app.add_subcommand("optimize", "windowed gradient-based damping controls");
  auto* mppi = app.add_subcommand("mppi", "receding-horizon MPPI baseline");
  auto* grad = app.add_subcommand("gradcheck", "window gradient vs finite differences");
  auto* met = app.add_subcommand("metrics", "damping metrics of an energy CSV");
  std::string metrics_csv;
  std::optional<double> metrics_t_end;
  met->add_option("csv", metrics_csv, "energy CSV")->required();
  met->add_option("--disturbance-end", metrics_t_end,
                  "end of the disturbance (s); default scenario.disturbance_duration");
  for (auto* sc : {sim, energy, opt, mppi, grad, met}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code;
  }

  try {
    cli::Context ctx;
    ctx.out = &out;
    ctx.config = load_config(config_path, overrides);
    if (out_dir) ctx.config.output_directory = *out_dir;
    ctx.dir = ctx.config.output_directory;
    if (*met) return cli::cmd_metrics(ctx, metrics_csv, metrics_t_end);

    std::filesystem::create_directories(ctx.dir);
    cli::write_json(ctx.path("config.json"), config_to_json(ctx.config));
    if (*sim) return cli::cmd_simulate(ctx);
    if (*energy) return cli::cmd_energy_test(ctx);
    if (*opt) return cli::cmd_optimize(ctx);
    if (*mppi) return cli::cmd_mppi(ctx);
    if (*grad) return cli::cmd_gradcheck(ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SimulationError& e) {
    err << "simulation error (" << to_string(e.kind()) << "): " << e.what();
    if (e.step() >= 0) err << " at step " << e.step();
    err << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace dmpm
