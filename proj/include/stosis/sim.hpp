#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stosis/errors.hpp"
#include "stosis/model.hpp"
#include "stosis/rng.hpp"

namespace stosis {

enum class Scheme { rk4, euler_maruyama, milstein };

const char* to_string(Scheme s);
std::optional<Scheme> scheme_from_string(std::string_view name);

struct SimConfig {
  double x0 = 0.0;
  double t_end = 0.0;
  double dt = 0.05;
  Scheme scheme = Scheme::euler_maruyama;
  std::uint64_t seed = 0;
  double clamp_eps = 1e-12;       // clamp band [eps*N, (1-eps)*N]
  std::int64_t record_every = 1;  // state stored every this many steps

  void validate(const ModelParams& p) const;  // throws ConfigError
};

struct ClampStats {
  std::int64_t events = 0;
  double first_time = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> martingale_values;  // running int_0^t sigma*phi(x) dB
  std::vector<std::uint8_t> clamped;      // 1: a clamp occurred since the previous record
  ClampStats clamp_stats;
  Scheme scheme = Scheme::euler_maruyama;
  std::optional<std::uint64_t> seed;  // absent for the deterministic solver
};

/// Classical RK4 on the drift. Requires cfg.scheme == rk4.
Trajectory simulate_ode(const ModelParams& p, const IncidenceFunction& f, const SimConfig& cfg);

/// Euler-Maruyama or Milstein path driven by the stream keyed (cfg.seed, 0).
/// States are clamped into [eps*N, (1-eps)*N] and every clamp is logged.
Trajectory simulate_sde(const ModelParams& p, const IncidenceFunction& f, const SimConfig& cfg);

/// martingale value at t_end divided by t_end. SDE trajectories only.
double martingale_average(const Trajectory& tr);

// Single unclamped scheme steps, exposed for the convergence-order protocols.
double em_step(const ModelParams& p, const IncidenceFunction& f, double x, double dt, double dB);
double milstein_step(const ModelParams& p, const IncidenceFunction& f, double x, double dt,
                     double dB);
double rk4_step(const ModelParams& p, const IncidenceFunction& f, double x, double dt);

namespace detail {

// t_end split into full dt steps plus one final step ending exactly at t_end.
struct StepGrid {
  std::int64_t n_full = 0;  // steps of size dt
  double dt_last = 0.0;     // final step, in (0, dt*(1+1e-9)]
  std::int64_t total() const { return n_full + (dt_last > 0.0 ? 1 : 0); }
};

inline StepGrid make_grid(double t_end, double dt) {
  StepGrid g;
  const double ratio = t_end / dt;
  auto n = static_cast<std::int64_t>(std::ceil(ratio - 1e-9));
  if (n < 1) n = 1;
  g.n_full = n - 1;
  g.dt_last = t_end - static_cast<double>(g.n_full) * dt;
  return g;
}

// Drives the SDE recurrence; on_record(t, x, martingale, clamped_since_last)
// fires at t = 0, every record_every-th step, and the final step. The Gaussian
// draw happens every step even when sigma = 0 so streams stay aligned.
template <class OnRecord>
ClampStats integrate_sde(const ModelParams& p, const IncidenceFunction& f, const SimConfig& cfg,
                         GaussianStream& gauss, OnRecord&& on_record) {
  const double N = p.N;
  const double lo = cfg.clamp_eps * N;
  const double hi = (1.0 - cfg.clamp_eps) * N;
  const bool milstein = cfg.scheme == Scheme::milstein;

  ClampStats clamps;
  double x = cfg.x0;
  double mart = 0.0;
  bool block_clamped = false;
  on_record(0.0, x, 0.0, false);

  const StepGrid grid = make_grid(cfg.t_end, cfg.dt);
  const std::int64_t total = grid.total();
  for (std::int64_t k = 0; k < total; ++k) {
    const bool last = k == total - 1;
    const double dtk = (k < grid.n_full) ? cfg.dt : grid.dt_last;
    const double t_next = last ? cfg.t_end : static_cast<double>(k + 1) * cfg.dt;

    const double hx = f.eval(x);
    const double b = drift_from_h(p, hx, x);
    const double amp = noise_amp_from_h(p, hx, x);
    const double dB = std::sqrt(dtk) * gauss.next();

    double x_next = x + b * dtk + amp * dB;
    if (milstein) {
      const double amp_d = p.sigma * (f.deriv(x) * (N - x) - hx);
      x_next += 0.5 * amp * amp_d * (dB * dB - dtk);
    }
    mart += p.sigma * phi_safe(p, f, x) * dB;

    if (!std::isfinite(x_next))
      throw NumericsError("sde state became non-finite at step " + std::to_string(k), k);
    if (x_next < lo || x_next > hi) {
      x_next = x_next < lo ? lo : hi;
      if (clamps.events == 0) clamps.first_time = t_next;
      ++clamps.events;
      block_clamped = true;
    }
    x = x_next;

    if (last || (k + 1) % cfg.record_every == 0) {
      on_record(t_next, x, mart, block_clamped);
      block_clamped = false;
    }
  }
  return clamps;
}

// RK4 driver with the same recording contract; martingale is identically 0.
// A step landing outside [0,N] by more than eps*N aborts as instability.
template <class OnRecord>
ClampStats integrate_ode(const ModelParams& p, const IncidenceFunction& f, const SimConfig& cfg,
                         OnRecord&& on_record) {
  const double N = p.N;
  const double lo = cfg.clamp_eps * N;
  const double hi = (1.0 - cfg.clamp_eps) * N;

  ClampStats clamps;
  double x = cfg.x0;
  bool block_clamped = false;
  on_record(0.0, x, 0.0, false);

  auto b = [&](double y) { return drift_from_h(p, f.eval(y), y); };

  const StepGrid grid = make_grid(cfg.t_end, cfg.dt);
  const std::int64_t total = grid.total();
  for (std::int64_t k = 0; k < total; ++k) {
    const bool last = k == total - 1;
    const double dtk = (k < grid.n_full) ? cfg.dt : grid.dt_last;
    const double t_next = last ? cfg.t_end : static_cast<double>(k + 1) * cfg.dt;

    const double k1 = b(x);
    const double k2 = b(x + 0.5 * dtk * k1);
    const double k3 = b(x + 0.5 * dtk * k2);
    const double k4 = b(x + dtk * k3);
    double x_next = x + dtk / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!std::isfinite(x_next))
      throw NumericsError("ode state became non-finite at step " + std::to_string(k), k);
    if (x_next < lo || x_next > hi) {
      if (x_next < -cfg.clamp_eps * N || x_next > N * (1.0 + cfg.clamp_eps))
        throw NumericsError("ode step left [0,N] at step " + std::to_string(k) +
                                "; reduce dt",
                            k);
      x_next = x_next < lo ? lo : hi;
      if (clamps.events == 0) clamps.first_time = t_next;
      ++clamps.events;
      block_clamped = true;
    }
    x = x_next;

    if (last || (k + 1) % cfg.record_every == 0) {
      on_record(t_next, x, 0.0, block_clamped);
      block_clamped = false;
    }
  }
  return clamps;
}

}  // namespace detail

}  // namespace stosis
