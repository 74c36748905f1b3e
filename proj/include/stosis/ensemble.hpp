#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "stosis/sim.hpp"

namespace stosis {

struct Histogram {
  std::vector<double> edges;   // bins+1 ascending edges spanning [0,N]
  std::vector<double> masses;  // probability masses, sum to 1
  std::int64_t count = 0;      // pooled sample count
};

/// Max over bins of |CDF1 - CDF2|. Requires identical bin edges.
double ks_distance(const Histogram& a, const Histogram& b);

struct EnsembleConfig {
  SimConfig base;  // per-trajectory template; base.seed is ignored here
  int n_trajectories = 100;
  std::uint64_t master_seed = 0;  // trajectory i uses stream (master_seed, i)
  double burn_in = 0.0;           // statistics collected for t >= burn_in
  int histogram_bins = 100;
  double extinction_threshold = 1e-6;  // fraction of N
  std::optional<double> crossing_level;
  std::optional<std::pair<double, double>> hitting_interval;  // open interval (a,b)
  int workers = 0;  // 0: hardware concurrency

  void validate(const ModelParams& p) const;  // throws ConfigError
};

struct HittingStats {
  double a = 0.0, b = 0.0;
  std::vector<double> times;  // first-entry times, uncensored trajectories only
  std::int64_t censored = 0;
};

struct EnsembleSummary {
  std::vector<double> terminal_states;            // x(t_end) per trajectory
  double extinction_fraction = 0.0;               // terminal < threshold*N
  std::vector<std::int64_t> crossing_counts;      // per trajectory; empty if no level
  std::vector<double> post_burn_in_max;           // per-trajectory max over t >= burn_in
  std::vector<double> post_burn_in_min;
  Histogram histogram;                            // pooled post-burn-in states
  std::optional<HittingStats> hitting;
  std::vector<std::int64_t> clamp_events;         // per trajectory
  std::int64_t clamp_events_total = 0;
  int paths_with_clamps = 0;

  // Wall-clock metrics; excluded from the canonical JSON so that summaries
  // are byte-identical across runs and worker counts.
  double wall_seconds = 0.0;
  double steps_per_second = 0.0;
};

/// n_trajectories independent SDE paths with streaming statistics. The result
/// is a pure function of (params, incidence, config): per-trajectory results
/// land in pre-allocated slots and the reduction runs in index order, so any
/// worker count produces the same summary.
EnsembleSummary run_ensemble(const ModelParams& p, const IncidenceFunction& f,
                             const EnsembleConfig& cfg);

/// Sign changes of x(t) - level over recorded points with t >= t_min.
std::int64_t crossing_count(const Trajectory& tr, double level, double t_min);

/// Pooled post-burn-in histogram; requires burn_in > 0 and at least one
/// post-burn-in sample (ConfigError otherwise).
Histogram empirical_stationary(const ModelParams& p, const IncidenceFunction& f,
                               const EnsembleConfig& cfg);

struct HittingTimeEstimate {
  double mean = 0.0;       // over uncensored samples
  double std_error = 0.0;  // sample standard error of the mean
  double bound = 0.0;      // analytic expected-entry-time bound
  std::int64_t n_hit = 0;
  std::int64_t n_censored = 0;
  double censored_fraction = 0.0;
  bool within_bound = false;  // mean <= bound + 3*std_error
};

/// First-entry-time estimate into (a,b) from cfg.base.x0, with the analytic
/// bound attached. Throws std::domain_error if x0 already lies in (a,b),
/// RegimeError outside the persistence regime. Censored paths are excluded
/// from the mean and reported.
HittingTimeEstimate mean_hitting_time(const ModelParams& p, const IncidenceFunction& f,
                                      const EnsembleConfig& cfg, double a, double b);

struct LimProbeReport {
  double level = 0.0;
  double frac_max_ge_level = 0.0;
  double frac_min_le_level = 0.0;
  std::vector<double> maxima;  // per trajectory, post burn-in
  std::vector<double> minima;
};

/// Post-burn-in running extrema versus the endemic level; requires burn_in > 0.
LimProbeReport limsup_liminf_probe(const ModelParams& p, const IncidenceFunction& f,
                                   const EnsembleConfig& cfg, double xi);

}  // namespace stosis
