#include "stosis/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace stosis {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::rk4: return "rk4";
    case Scheme::euler_maruyama: return "euler_maruyama";
    case Scheme::milstein: return "milstein";
  }
  return "euler_maruyama";
}

std::optional<Scheme> scheme_from_string(std::string_view name) {
  if (name == "rk4") return Scheme::rk4;
  if (name == "euler_maruyama") return Scheme::euler_maruyama;
  if (name == "milstein") return Scheme::milstein;
  return std::nullopt;
}

void SimConfig::validate(const ModelParams& p) const {
  auto fail = [](const std::string& msg) { throw ConfigError("sim config: " + msg); };
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) fail("t_end must be positive");
  if (!(dt < t_end)) fail("dt must be smaller than t_end");
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) fail("clamp_eps must lie in (0, 0.5)");
  if (!(x0 > clamp_eps * p.N && x0 < p.N * (1.0 - clamp_eps)))
    fail("x0 must lie strictly inside the clamp band of (0,N)");
  if (record_every < 1) fail("record_every must be >= 1");
}

namespace {

Trajectory make_recorder_target(const SimConfig& cfg, bool stochastic) {
  Trajectory tr;
  const auto total = detail::make_grid(cfg.t_end, cfg.dt).total();
  const auto expected = static_cast<std::size_t>(total / cfg.record_every + 2);
  tr.times.reserve(expected);
  tr.values.reserve(expected);
  tr.martingale_values.reserve(expected);
  tr.clamped.reserve(expected);
  tr.scheme = cfg.scheme;
  if (stochastic) tr.seed = cfg.seed;
  return tr;
}

}  // namespace

Trajectory simulate_ode(const ModelParams& p, const IncidenceFunction& f, const SimConfig& cfg) {
  p.validate();
  cfg.validate(p);
  if (cfg.scheme != Scheme::rk4)
    throw ConfigError("simulate_ode requires scheme rk4");

  Trajectory tr = make_recorder_target(cfg, false);
  auto rec = [&](double t, double x, double mart, bool clamped) {
    tr.times.push_back(t);
    tr.values.push_back(x);
    tr.martingale_values.push_back(mart);
    tr.clamped.push_back(clamped ? 1 : 0);
  };
  tr.clamp_stats = detail::integrate_ode(p, f, cfg, rec);
  return tr;
}

Trajectory simulate_sde(const ModelParams& p, const IncidenceFunction& f, const SimConfig& cfg) {
  p.validate();
  cfg.validate(p);
  if (cfg.scheme != Scheme::euler_maruyama && cfg.scheme != Scheme::milstein)
    throw ConfigError("simulate_sde requires scheme euler_maruyama or milstein");

  Trajectory tr = make_recorder_target(cfg, true);
  auto rec = [&](double t, double x, double mart, bool clamped) {
    tr.times.push_back(t);
    tr.values.push_back(x);
    tr.martingale_values.push_back(mart);
    tr.clamped.push_back(clamped ? 1 : 0);
  };
  GaussianStream gauss(cfg.seed, 0);
  tr.clamp_stats = detail::integrate_sde(p, f, cfg, gauss, rec);
  return tr;
}

double martingale_average(const Trajectory& tr) {
  if (tr.scheme == Scheme::rk4 || !tr.seed.has_value())
    throw std::invalid_argument("martingale_average is undefined for deterministic trajectories");
  if (tr.times.empty() || !(tr.times.back() > 0.0))
    throw std::invalid_argument("martingale_average needs a trajectory with t_end > 0");
  return tr.martingale_values.back() / tr.times.back();
}

double em_step(const ModelParams& p, const IncidenceFunction& f, double x, double dt, double dB) {
  const double hx = f.eval(x);
  return x + detail::drift_from_h(p, hx, x) * dt + detail::noise_amp_from_h(p, hx, x) * dB;
}

double milstein_step(const ModelParams& p, const IncidenceFunction& f, double x, double dt,
                     double dB) {
  const double hx = f.eval(x);
  const double amp = detail::noise_amp_from_h(p, hx, x);
  const double amp_d = p.sigma * (f.deriv(x) * (p.N - x) - hx);
  return x + detail::drift_from_h(p, hx, x) * dt + amp * dB +
         0.5 * amp * amp_d * (dB * dB - dt);
}

double rk4_step(const ModelParams& p, const IncidenceFunction& f, double x, double dt) {
  auto b = [&](double y) { return detail::drift_from_h(p, f.eval(y), y); };
  const double k1 = b(x);
  const double k2 = b(x + 0.5 * dt * k1);
  const double k3 = b(x + 0.5 * dt * k2);
  const double k4 = b(x + dt * k3);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace stosis
