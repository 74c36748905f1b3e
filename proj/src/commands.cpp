#include "stosis/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "stosis/analysis.hpp"
#include "stosis/ensemble.hpp"
#include "stosis/errors.hpp"
#include "stosis/report.hpp"

namespace stosis {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path prepare_output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output.directory);
  fs::create_directories(dir);
  // Every run leaves a reparseable copy of the fully resolved configuration.
  write_text_file((dir / "resolved_config.ini").string(), cfg.to_ini());
  return dir;
}

void write_json_report(const fs::path& path, json j) {
  write_text_file(path.string(), j.dump(2) + "\n");
}

json report_envelope(const RunConfig& cfg) {
  return json{{"config", to_json(cfg)}, {"model", to_json(cfg.model)}};
}

}  // namespace

int cmd_classify(const RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const IncidenceFunction f = cfg.make_incidence();
  const ValidationReport validation = validate_incidence(f, 10.0 * cfg.model.N, 1000);
  const RegimeReport report = classify_regime(cfg.model, f);

  json j = report_envelope(cfg);
  j["incidence_validation"] = to_json(validation);
  j["regime"] = to_json(report);
  write_json_report(dir / "classify.json", j);
  std::cout << "verdict: " << to_string(report.verdict) << "\n";
  return kExitOk;
}

int cmd_xi(const RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const IncidenceFunction f = cfg.make_incidence();
  const LyapunovRoots roots = lyapunov_roots(cfg.model);
  const double xi = solve_xi(cfg.model, f);
  const double m = find_mode_m(cfg.model, f, xi);

  json j = report_envelope(cfg);
  j["roots"] = to_json(roots);
  j["xi"] = xi;
  j["m"] = m;
  j["phi_at_xi"] = phi(cfg.model, f, xi);
  write_json_report(dir / "xi.json", j);
  std::cout << "xi = " << format_sig17(xi) << ", m = " << format_sig17(m) << "\n";
  return kExitOk;
}

int cmd_lyapunov(const RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const IncidenceFunction f = cfg.make_incidence();
  lyapunov_roots(cfg.model);  // surfaces the degenerate/regime errors up front

  const int n = cfg.experiment.grid_points;
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> direct(static_cast<std::size_t>(n));
  std::vector<double> factored(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    xs[iu] = static_cast<double>(i + 1) * cfg.model.N / (n + 1);
    direct[iu] = lyapunov_ln_direct(cfg.model, f, xs[iu]);
    factored[iu] = lyapunov_ln_factored(cfg.model, f, xs[iu]);
  }

  if (cfg.output.csv) write_lyapunov_csv((dir / "lyapunov.csv").string(), xs, direct, factored);
  if (cfg.output.json) {
    json j = report_envelope(cfg);
    j["x"] = xs;
    j["lyapunov_ln_direct"] = direct;
    j["lyapunov_ln_factored"] = factored;
    write_json_report(dir / "lyapunov.json", j);
  }
  if (cfg.output.svg)
    write_svg_line((dir / "lyapunov.svg").string(), xs, direct, "log-generator over (0,N)");
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const IncidenceFunction f = cfg.make_incidence();
  const Trajectory tr = cfg.experiment.sim.scheme == Scheme::rk4
                            ? simulate_ode(cfg.model, f, cfg.experiment.sim)
                            : simulate_sde(cfg.model, f, cfg.experiment.sim);

  if (cfg.output.csv) write_trajectory_csv((dir / "trajectory.csv").string(), tr);
  if (cfg.output.json) {
    json j = report_envelope(cfg);
    j["t"] = tr.times;
    j["x"] = tr.values;
    j["martingale"] = tr.martingale_values;
    j["clamped"] = tr.clamped;
    j["clamp_events"] = tr.clamp_stats.events;
    write_json_report(dir / "trajectory.json", j);
  }
  if (cfg.output.svg)
    write_svg_line((dir / "trajectory.svg").string(), tr.times, tr.values, "x(t)");
  if (tr.clamp_stats.events > 0)
    std::cerr << "note: " << tr.clamp_stats.events << " clamp events, first at t = "
              << tr.clamp_stats.first_time << "\n";
  return kExitOk;
}

int cmd_ensemble(const RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const IncidenceFunction f = cfg.make_incidence();
  const EnsembleConfig ecfg = cfg.make_ensemble();
  const EnsembleSummary summary = run_ensemble(cfg.model, f, ecfg);

  json j = report_envelope(cfg);
  j["summary"] = to_json(summary);
  write_json_report(dir / "ensemble.json", j);
  std::cerr << "ensemble: " << ecfg.n_trajectories << " trajectories in "
            << summary.wall_seconds << " s (" << summary.steps_per_second << " steps/s)\n";

  if (cfg.experiment.write_trajectories) {
    for (int i = 0; i < ecfg.n_trajectories; ++i) {
      SimConfig one = ecfg.base;
      one.seed = ecfg.master_seed;
      Trajectory tr;
      {
        GaussianStream gauss(ecfg.master_seed, static_cast<std::uint64_t>(i));
        auto rec = [&](double t, double x, double mart, bool clamped) {
          tr.times.push_back(t);
          tr.values.push_back(x);
          tr.martingale_values.push_back(mart);
          tr.clamped.push_back(clamped ? 1 : 0);
        };
        tr.clamp_stats = detail::integrate_sde(cfg.model, f, one, gauss, rec);
        tr.scheme = one.scheme;
        tr.seed = ecfg.master_seed;
      }
      char name[48];
      std::snprintf(name, sizeof name, "trajectory_%04d.csv", i);
      write_trajectory_csv((dir / name).string(), tr);
    }
  }
  return kExitOk;
}

int cmd_stationary(const RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const IncidenceFunction f = cfg.make_incidence();
  const RegimeReport regime = classify_regime(cfg.model, f);
  if (regime.verdict != Verdict::persistence_unique_stationary)
    std::cerr << "warning: parameters are not in the persistence regime (verdict "
              << to_string(regime.verdict) << "); the pooled histogram may not be stationary\n";

  const Histogram hist = empirical_stationary(cfg.model, f, cfg.make_ensemble());
  if (cfg.output.csv) write_histogram_csv((dir / "stationary.csv").string(), hist);
  if (cfg.output.json) {
    json j = report_envelope(cfg);
    j["histogram"] = to_json(hist);
    j["verdict"] = to_string(regime.verdict);
    write_json_report(dir / "stationary.json", j);
  }
  if (cfg.output.svg)
    write_svg_histogram((dir / "stationary.svg").string(), hist, "empirical stationary measure");
  return kExitOk;
}

int run_experiment(const RunConfig& cfg) {
  switch (cfg.experiment.kind) {
    case ExperimentKind::classify: return cmd_classify(cfg);
    case ExperimentKind::xi: return cmd_xi(cfg);
    case ExperimentKind::lyapunov: return cmd_lyapunov(cfg);
    case ExperimentKind::simulate: return cmd_simulate(cfg);
    case ExperimentKind::ensemble: return cmd_ensemble(cfg);
    case ExperimentKind::stationary: return cmd_stationary(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace stosis
