#include "stosis/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "stosis/analysis.hpp"
#include "stosis/errors.hpp"

namespace stosis {

void EnsembleConfig::validate(const ModelParams& p) const {
  base.validate(p);
  auto fail = [](const std::string& msg) { throw ConfigError("ensemble config: " + msg); };
  if (base.scheme == Scheme::rk4) fail("ensembles integrate the SDE; scheme must be stochastic");
  if (n_trajectories < 1) fail("n_trajectories must be >= 1");
  if (!(burn_in >= 0.0) || !(burn_in < base.t_end)) fail("burn_in must lie in [0, t_end)");
  if (histogram_bins < 10) fail("histogram_bins must be >= 10");
  if (!(extinction_threshold > 0.0 && extinction_threshold < 1.0))
    fail("extinction_threshold must be a fraction of N in (0,1)");
  if (hitting_interval) {
    const auto [a, b] = *hitting_interval;
    if (!(0.0 < a && a < b && b < p.N)) fail("hitting interval must satisfy 0 < a < b < N");
  }
}

namespace {

struct TrajResult {
  double terminal = std::numeric_limits<double>::quiet_NaN();
  std::int64_t clamp_events = 0;
  std::int64_t crossings = 0;
  double post_max = -std::numeric_limits<double>::infinity();
  double post_min = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> bin_counts;
  std::int64_t post_samples = 0;
  bool hit = false;
  double hit_time = std::numeric_limits<double>::quiet_NaN();
  std::int64_t steps = 0;
};

TrajResult run_one(const ModelParams& p, const IncidenceFunction& f, const EnsembleConfig& cfg,
                   int index) {
  TrajResult r;
  r.bin_counts.assign(static_cast<std::size_t>(cfg.histogram_bins), 0);
  const double bin_scale = cfg.histogram_bins / p.N;
  const double burn = cfg.burn_in;
  const double hit_a = cfg.hitting_interval ? cfg.hitting_interval->first : 0.0;
  const double hit_b = cfg.hitting_interval ? cfg.hitting_interval->second : 0.0;
  const bool want_hit = cfg.hitting_interval.has_value();
  const bool want_cross = cfg.crossing_level.has_value();
  const double level = want_cross ? *cfg.crossing_level : 0.0;

  bool have_side = false;
  bool above = false;

  auto rec = [&](double t, double x, double, bool) {
    ++r.steps;
    r.terminal = x;
    if (want_hit && !r.hit && x > hit_a && x < hit_b) {
      r.hit = true;
      r.hit_time = t;
    }
    if (t >= burn) {
      r.post_max = std::max(r.post_max, x);
      r.post_min = std::min(r.post_min, x);
      auto bin = static_cast<std::int64_t>(x * bin_scale);
      bin = std::clamp<std::int64_t>(bin, 0, cfg.histogram_bins - 1);
      ++r.bin_counts[static_cast<std::size_t>(bin)];
      ++r.post_samples;
      if (want_cross) {
        const bool now_above = x > level;
        if (have_side && now_above != above) ++r.crossings;
        above = now_above;
        have_side = true;
      }
    }
  };

  SimConfig c = cfg.base;
  GaussianStream gauss(cfg.master_seed, static_cast<std::uint64_t>(index));
  const ClampStats clamps = detail::integrate_sde(p, f, c, gauss, rec);
  r.clamp_events = clamps.events;
  return r;
}

}  // namespace

EnsembleSummary run_ensemble(const ModelParams& p, const IncidenceFunction& f,
                             const EnsembleConfig& cfg) {
  p.validate();
  cfg.validate(p);
  const auto t0 = std::chrono::steady_clock::now();

  const int n = cfg.n_trajectories;
  std::vector<TrajResult> slots(static_cast<std::size_t>(n));

  int workers = cfg.workers > 0 ? cfg.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n);

  std::atomic<int> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    while (!abort.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= n) break;
      try {
        slots[static_cast<std::size_t>(i)] = run_one(p, f, cfg, i);
      } catch (const NumericsError& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error)
          error = std::make_exception_ptr(
              NumericsError("trajectory " + std::to_string(i) + ": " + e.what(), e.step));
        abort.store(true);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        abort.store(true);
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  // Index-ordered reduction: identical output for every worker count.
  EnsembleSummary s;
  s.terminal_states.reserve(static_cast<std::size_t>(n));
  s.post_burn_in_max.reserve(static_cast<std::size_t>(n));
  s.post_burn_in_min.reserve(static_cast<std::size_t>(n));
  s.clamp_events.reserve(static_cast<std::size_t>(n));
  if (cfg.crossing_level) s.crossing_counts.reserve(static_cast<std::size_t>(n));

  std::vector<std::int64_t> pooled(static_cast<std::size_t>(cfg.histogram_bins), 0);
  std::int64_t pooled_count = 0;
  std::int64_t extinct = 0;
  std::int64_t total_steps = 0;
  const double threshold = cfg.extinction_threshold * p.N;

  if (cfg.hitting_interval) {
    s.hitting = HittingStats{};
    s.hitting->a = cfg.hitting_interval->first;
    s.hitting->b = cfg.hitting_interval->second;
  }

  for (const TrajResult& r : slots) {
    s.terminal_states.push_back(r.terminal);
    s.post_burn_in_max.push_back(r.post_max);
    s.post_burn_in_min.push_back(r.post_min);
    s.clamp_events.push_back(r.clamp_events);
    s.clamp_events_total += r.clamp_events;
    if (r.clamp_events > 0) ++s.paths_with_clamps;
    if (cfg.crossing_level) s.crossing_counts.push_back(r.crossings);
    if (r.terminal < threshold) ++extinct;
    for (int bi = 0; bi < cfg.histogram_bins; ++bi)
      pooled[static_cast<std::size_t>(bi)] += r.bin_counts[static_cast<std::size_t>(bi)];
    pooled_count += r.post_samples;
    total_steps += r.steps;
    if (s.hitting) {
      if (r.hit)
        s.hitting->times.push_back(r.hit_time);
      else
        ++s.hitting->censored;
    }
  }

  s.extinction_fraction = static_cast<double>(extinct) / n;
  s.histogram.count = pooled_count;
  s.histogram.edges.resize(static_cast<std::size_t>(cfg.histogram_bins) + 1);
  for (int i = 0; i <= cfg.histogram_bins; ++i)
    s.histogram.edges[static_cast<std::size_t>(i)] =
        static_cast<double>(i) * p.N / cfg.histogram_bins;
  s.histogram.masses.resize(static_cast<std::size_t>(cfg.histogram_bins));
  for (int i = 0; i < cfg.histogram_bins; ++i)
    s.histogram.masses[static_cast<std::size_t>(i)] =
        pooled_count > 0 ? static_cast<double>(pooled[static_cast<std::size_t>(i)]) / pooled_count
                         : 0.0;

  const auto t1 = std::chrono::steady_clock::now();
  s.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  s.steps_per_second = s.wall_seconds > 0.0 ? static_cast<double>(total_steps) / s.wall_seconds
                                            : 0.0;
  return s;
}

std::int64_t crossing_count(const Trajectory& tr, double level, double t_min) {
  std::int64_t crossings = 0;
  bool have_side = false;
  bool above = false;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] < t_min) continue;
    const bool now_above = tr.values[i] > level;
    if (have_side && now_above != above) ++crossings;
    above = now_above;
    have_side = true;
  }
  return crossings;
}

double ks_distance(const Histogram& a, const Histogram& b) {
  if (a.edges.size() != b.edges.size() || !std::equal(a.edges.begin(), a.edges.end(),
                                                      b.edges.begin()))
    throw ConfigError("ks_distance: histograms must share identical bin edges");
  double cdf_a = 0.0, cdf_b = 0.0, d = 0.0;
  for (std::size_t i = 0; i < a.masses.size(); ++i) {
    cdf_a += a.masses[i];
    cdf_b += b.masses[i];
    d = std::max(d, std::abs(cdf_a - cdf_b));
  }
  return d;
}

Histogram empirical_stationary(const ModelParams& p, const IncidenceFunction& f,
                               const EnsembleConfig& cfg) {
  if (!(cfg.burn_in > 0.0))
    throw ConfigError("empirical_stationary requires burn_in > 0");
  EnsembleSummary s = run_ensemble(p, f, cfg);
  if (s.histogram.count == 0)
    throw ConfigError("empirical_stationary: zero post-burn-in samples");
  return s.histogram;
}

HittingTimeEstimate mean_hitting_time(const ModelParams& p, const IncidenceFunction& f,
                                      const EnsembleConfig& cfg, double a, double b) {
  if (cfg.base.x0 > a && cfg.base.x0 < b)
    throw std::domain_error("mean_hitting_time: x0 already inside (a,b)");
  // RegimeError here when the persistence hypotheses fail.
  const double bound = hitting_time_bound(p, f, a, b, cfg.base.x0);

  EnsembleConfig run_cfg = cfg;
  run_cfg.hitting_interval = std::make_pair(a, b);
  EnsembleSummary s = run_ensemble(p, f, run_cfg);

  HittingTimeEstimate est;
  est.bound = bound;
  est.n_hit = static_cast<std::int64_t>(s.hitting->times.size());
  est.n_censored = s.hitting->censored;
  est.censored_fraction =
      static_cast<double>(est.n_censored) / static_cast<double>(cfg.n_trajectories);
  if (est.n_hit > 0) {
    double sum = 0.0;
    for (double t : s.hitting->times) sum += t;
    est.mean = sum / static_cast<double>(est.n_hit);
    double ss = 0.0;
    for (double t : s.hitting->times) ss += (t - est.mean) * (t - est.mean);
    est.std_error = est.n_hit > 1
                        ? std::sqrt(ss / (static_cast<double>(est.n_hit - 1) *
                                          static_cast<double>(est.n_hit)))
                        : 0.0;
    est.within_bound = est.mean <= est.bound + 3.0 * est.std_error;
  } else {
    est.mean = std::numeric_limits<double>::quiet_NaN();
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    est.within_bound = false;
  }
  return est;
}

LimProbeReport limsup_liminf_probe(const ModelParams& p, const IncidenceFunction& f,
                                   const EnsembleConfig& cfg, double xi) {
  if (!(cfg.burn_in > 0.0))
    throw ConfigError("limsup_liminf_probe requires burn_in > 0");
  EnsembleSummary s = run_ensemble(p, f, cfg);
  LimProbeReport rep;
  rep.level = xi;
  rep.maxima = s.post_burn_in_max;
  rep.minima = s.post_burn_in_min;
  std::int64_t up = 0, down = 0;
  for (double v : rep.maxima)
    if (v >= xi) ++up;
  for (double v : rep.minima)
    if (v <= xi) ++down;
  rep.frac_max_ge_level = static_cast<double>(up) / static_cast<double>(rep.maxima.size());
  rep.frac_min_le_level = static_cast<double>(down) / static_cast<double>(rep.minima.size());
  return rep;
}

}  // namespace stosis
