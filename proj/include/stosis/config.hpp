#pragma once

#include <optional>
#include <string>

#include "stosis/ensemble.hpp"
#include "stosis/incidence.hpp"
#include "stosis/model.hpp"
#include "stosis/sim.hpp"

namespace stosis {

struct IncidenceConfig {
  std::string family = "h1";  // "h1" | "h2"
  double kappa = 1.0;
  double alpha = 0.01;  // default 0.01 for h1, 0.0001 for h2

  IncidenceFunction make() const;
};

enum class ExperimentKind { classify, xi, lyapunov, simulate, ensemble, stationary };

const char* to_string(ExperimentKind k);
std::optional<ExperimentKind> experiment_from_string(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::classify;

  // simulate / ensemble / stationary
  SimConfig sim;

  // ensemble / stationary
  int n_trajectories = 100;
  double burn_in = 0.0;  // resolved default: 10% of t_end
  int histogram_bins = 100;
  double extinction_threshold = 1e-6;
  std::optional<double> crossing_level;
  std::optional<double> hitting_a;
  std::optional<double> hitting_b;
  bool write_trajectories = false;

  // lyapunov
  int grid_points = 1000;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool svg = false;
};

struct RunConfig {
  ModelParams model;
  IncidenceConfig incidence;
  ExperimentConfig experiment;
  OutputConfig output;
  int workers = 0;  // 0: hardware concurrency; CLI flag only, not persisted

  IncidenceFunction make_incidence() const { return incidence.make(); }
  EnsembleConfig make_ensemble() const;

  // Fully resolved, reparseable rendering; parse_config(to_ini()) round-trips.
  std::string to_ini() const;
};

/// Parses the flat-sectioned key = value config format. Every key is
/// validated against the schema: unknown keys, missing required keys, type
/// mismatches and duplicate sections all raise ConfigError naming the
/// offending key or section. Defaults are applied here so the result is
/// fully resolved.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

}  // namespace stosis
