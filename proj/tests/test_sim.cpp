#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stosis/errors.hpp"
#include "stosis/sim.hpp"
#include "test_support.hpp"

using namespace stosis;
using test::close_rel;

namespace {

SimConfig ode_cfg(double x0, double t_end, double dt) {
  SimConfig c;
  c.x0 = x0;
  c.t_end = t_end;
  c.dt = dt;
  c.scheme = Scheme::rk4;
  return c;
}

SimConfig sde_cfg(double x0, double t_end, double dt, std::uint64_t seed,
                  Scheme scheme = Scheme::euler_maruyama) {
  SimConfig c;
  c.x0 = x0;
  c.t_end = t_end;
  c.dt = dt;
  c.scheme = scheme;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("sim config validation") {
  const ModelParams p = test::persistence_params_h1();
  SimConfig c = sde_cfg(100.0, 10.0, 0.05, 1);
  CHECK_NOTHROW(c.validate(p));
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(p), ConfigError);
  c = sde_cfg(100.0, 10.0, 20.0, 1);  // dt >= t_end
  CHECK_THROWS_AS(c.validate(p), ConfigError);
  c = sde_cfg(0.0, 10.0, 0.05, 1);  // x0 on the boundary
  CHECK_THROWS_AS(c.validate(p), ConfigError);
  c = sde_cfg(100.0, 10.0, 0.05, 1);
  c.record_every = 0;
  CHECK_THROWS_AS(c.validate(p), ConfigError);
}

TEST_CASE("scheme and solver pairing") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  CHECK_THROWS_AS(simulate_ode(p, f, sde_cfg(100, 10, 0.05, 1)), ConfigError);
  CHECK_THROWS_AS(simulate_sde(p, f, ode_cfg(100, 10, 0.05)), ConfigError);
}

TEST_CASE("time grid: constant dt with an exact final time") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  // 10.3 / 0.05 is not an integer in floating point; the last step shrinks.
  const Trajectory tr = simulate_sde(p, f, sde_cfg(100, 10.3, 0.05, 3));
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == 10.3);
  for (std::size_t i = 1; i < tr.times.size(); ++i) REQUIRE(tr.times[i] > tr.times[i - 1]);
  // Interior spacing is exactly k*dt steps.
  CHECK(close_rel(tr.times[1] - tr.times[0], 0.05, 1e-12));
}

TEST_CASE("record_every subsamples but keeps the final point") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  SimConfig c = sde_cfg(100, 10.0, 0.05, 3);
  c.record_every = 7;
  const Trajectory coarse = simulate_sde(p, f, c);
  c.record_every = 1;
  const Trajectory fine = simulate_sde(p, f, c);
  CHECK(coarse.times.back() == fine.times.back());
  CHECK(coarse.values.back() == fine.values.back());
  CHECK(coarse.times.size() < fine.times.size());
  // Recorded points agree with the dense run at the same times.
  for (std::size_t i = 0; i < coarse.times.size(); ++i) {
    const auto it = std::find(fine.times.begin(), fine.times.end(), coarse.times[i]);
    REQUIRE(it != fine.times.end());
    const auto j = static_cast<std::size_t>(it - fine.times.begin());
    REQUIRE(coarse.values[i] == fine.values[j]);
  }
}

TEST_CASE("ode stays at the drift fixed point") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  // Interior equilibrium from the test-side bisection oracle.
  const double x_star = test::bisect(
      [&](double x) { return drift(p, f, x); }, 10.0, p.N - 1.0);
  const Trajectory tr = simulate_ode(p, f, ode_cfg(x_star, 100.0, 0.05));
  for (double v : tr.values) REQUIRE(std::abs(v - x_star) <= 1e-10 * p.N);
  CHECK(tr.clamp_stats.events == 0);
}

TEST_CASE("deterministic extinction decays monotonically and matches a fine reference") {
  const ModelParams p = test::extinction_params_h1();
  const IncidenceFunction f = test::default_h1();
  const Trajectory tr = simulate_ode(p, f, ode_cfg(10.0, 200.0, 0.05));
  for (std::size_t i = 1; i < tr.values.size(); ++i) REQUIRE(tr.values[i] < tr.values[i - 1]);
  CHECK(tr.values.back() < 10.0 * std::exp(-0.08 * 200.0));  // decays at least like the linear rate

  const Trajectory ref = simulate_ode(p, f, ode_cfg(10.0, 200.0, 0.0005));
  CHECK(close_rel(tr.values.back(), ref.values.back(), 1e-6));
  CHECK(tr.clamp_stats.events == 0);
}

TEST_CASE("rk4 self-convergence is fourth order") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const double T = 20.0;
  auto terminal = [&](double dt) {
    return simulate_ode(p, f, ode_cfg(100.0, T, dt)).values.back();
  };
  const double ref = terminal(0.005);
  std::vector<double> dts{0.8, 0.4, 0.2, 0.1};
  std::vector<double> errs;
  for (double dt : dts) errs.push_back(std::abs(terminal(dt) - ref));
  const double slope = test::log_log_slope(dts, errs);
  INFO("errors ", errs[0], " ", errs[1], " ", errs[2], " ", errs[3], " slope ", slope);
  CHECK(slope > 3.7);
  CHECK(slope < 4.3);
}

TEST_CASE("sde with sigma = 0 is exactly explicit Euler") {
  ModelParams p = test::persistence_params_h1();
  p.sigma = 0.0;
  const IncidenceFunction f = test::default_h1();
  const SimConfig c = sde_cfg(100.0, 10.3, 0.05, 42);
  const Trajectory tr = simulate_sde(p, f, c);

  double x = c.x0;
  const auto grid = detail::make_grid(c.t_end, c.dt);
  std::size_t idx = 1;
  for (std::int64_t k = 0; k < grid.total(); ++k) {
    const double dtk = k < grid.n_full ? c.dt : grid.dt_last;
    x = x + drift(p, f, std::clamp(x, 0.0, p.N)) * dtk;
    REQUIRE(tr.values[idx] == x);  // bitwise
    ++idx;
  }
  // Martingale accumulator is identically zero without noise.
  for (double m : tr.martingale_values) REQUIRE(m == 0.0);
}

TEST_CASE("same seed, same trajectory; different seed differs") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const SimConfig c = sde_cfg(100.0, 20.0, 0.05, 7);
  const Trajectory a = simulate_sde(p, f, c);
  const Trajectory b = simulate_sde(p, f, c);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    REQUIRE(a.values[i] == b.values[i]);
    REQUIRE(a.martingale_values[i] == b.martingale_values[i]);
  }
  SimConfig c2 = c;
  c2.seed = 8;
  const Trajectory d = simulate_sde(p, f, c2);
  CHECK(a.values.back() != d.values.back());
}

TEST_CASE("milstein differs from euler-maruyama but stays close over one step") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const double x = 100.0, dt = 0.05, dB = 0.11;
  const double em = em_step(p, f, x, dt, dB);
  const double mil = milstein_step(p, f, x, dt, dB);
  const double correction =
      0.5 * diffusion(p, f, x) * diffusion_deriv(p, f, x) * (dB * dB - dt);
  CHECK(close_rel(mil - em, correction, 1e-12));
}

TEST_CASE("values never leave the clamp band and clamps are logged") {
  // Violent noise to force boundary hits.
  ModelParams p = test::persistence_params_h1();
  p.sigma = 0.05;
  const IncidenceFunction f = test::default_h1();
  SimConfig c = sde_cfg(500.0, 50.0, 0.05, 12345);
  const Trajectory tr = simulate_sde(p, f, c);
  const double lo = c.clamp_eps * p.N;
  const double hi = (1.0 - c.clamp_eps) * p.N;
  for (double v : tr.values) {
    REQUIRE(v >= lo);
    REQUIRE(v <= hi);
    REQUIRE(v > 0.0);
    REQUIRE(v < p.N);
  }
  CHECK(tr.clamp_stats.events > 0);
  CHECK(std::isfinite(tr.clamp_stats.first_time));
  // The per-record clamp flags account for every event when record_every = 1.
  std::int64_t flagged = 0;
  for (auto flag : tr.clamped) flagged += flag;
  CHECK(flagged > 0);
  CHECK(flagged <= tr.clamp_stats.events);
}

TEST_CASE("non-finite states raise a numerics error with the step index") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  SimConfig c = sde_cfg(100.0, 1.7e308, 8e307, 1);  // drift*dt overflows immediately
  try {
    simulate_sde(p, f, c);
    FAIL("expected NumericsError");
  } catch (const NumericsError& e) {
    CHECK(e.step >= 0);
  }
}

TEST_CASE("martingale average wiring") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const Trajectory tr = simulate_sde(p, f, sde_cfg(100.0, 50.0, 0.05, 9));
  CHECK(martingale_average(tr) == tr.martingale_values.back() / 50.0);

  ModelParams quiet = p;
  quiet.sigma = 0.0;
  const Trajectory silent = simulate_sde(quiet, f, sde_cfg(100.0, 50.0, 0.05, 9));
  CHECK(martingale_average(silent) == 0.0);

  const Trajectory det = simulate_ode(p, f, ode_cfg(100.0, 50.0, 0.05));
  CHECK_THROWS_AS(martingale_average(det), std::invalid_argument);
}

TEST_CASE("martingale average obeys the law-of-large-numbers rate") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const double T = 2000.0, dt = 0.05;
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const Trajectory tr = simulate_sde(p, f, sde_cfg(100.0, T, dt, seed));
    const double avg = martingale_average(tr);
    // Empirical standard deviation of per-step increments.
    double ss = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 1; i < tr.martingale_values.size(); ++i) {
      const double inc = tr.martingale_values[i] - tr.martingale_values[i - 1];
      ss += inc * inc;
      ++n;
    }
    const double step_sd = std::sqrt(ss / static_cast<double>(n));
    const double se = step_sd / std::sqrt(T * dt);  // sd of M(T)/T
    INFO("seed ", seed, " avg ", avg, " se ", se);
    REQUIRE(std::abs(avg) <= 4.0 * se);
  }
}

TEST_CASE("longer horizons shrink the martingale average") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  std::vector<double> mag_short, mag_long;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    mag_short.push_back(
        std::abs(martingale_average(simulate_sde(p, f, sde_cfg(100.0, 500.0, 0.05, seed)))));
    mag_long.push_back(
        std::abs(martingale_average(simulate_sde(p, f, sde_cfg(100.0, 2000.0, 0.05, seed)))));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(mag_long) < median(mag_short));
}

TEST_CASE("gaussian stream moments and key separation") {
  GaussianStream g(99, 0);
  double sum = 0.0, ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = g.next();
    sum += z;
    ss += z * z;
  }
  const double mean = sum / n;
  const double var = ss / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);

  GaussianStream a(99, 1), b(99, 2), c(99, 1);
  const double va = a.next(), vb = b.next(), vc = c.next();
  CHECK(va != vb);
  CHECK(va == vc);
}
