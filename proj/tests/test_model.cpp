#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stosis/errors.hpp"
#include "stosis/model.hpp"
#include "test_support.hpp"

using namespace stosis;
using test::close_rel;

TEST_CASE("parameter validation") {
  ModelParams p = test::persistence_params_h1();
  CHECK_NOTHROW(p.validate());
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = test::persistence_params_h1();
  p.gamma = 0.0;
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = test::persistence_params_h1();
  p.sigma = -1e-3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("drift values and boundaries") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  CHECK(drift(p, f, 0.0) == 0.0);
  CHECK(close_rel(drift(p, f, p.N), -(p.gamma + p.mu) * p.N, 1e-15));
  // 0.0008*50*900 - 0.1001*100 = 36 - 10.01 = 25.99 by hand.
  CHECK(close_rel(drift(p, f, 100.0), 25.99, 1e-12));
  CHECK_THROWS_AS(drift(p, f, -1.0), std::domain_error);
  CHECK_THROWS_AS(drift(p, f, p.N + 1.0), std::domain_error);
}

TEST_CASE("diffusion values and boundaries") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  CHECK(diffusion(p, f, 0.0) == 0.0);
  CHECK(diffusion(p, f, p.N) == 0.0);
  // 0.001*50*900 = 45 by hand.
  CHECK(close_rel(diffusion(p, f, 100.0), 45.0, 1e-12));
  CHECK_THROWS_AS(diffusion(p, f, p.N * 1.5), std::domain_error);
}

TEST_CASE("diffusion derivative") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  CHECK(close_rel(diffusion_deriv(p, f, 0.0), p.sigma * f.slope_at_zero * p.N, 1e-15));
  CHECK(close_rel(diffusion_deriv(p, f, p.N), -p.sigma * f.eval(p.N), 1e-15));
  const double x = 100.0;
  const double delta = 1e-5 * x;
  const double fd = (diffusion(p, f, x + delta) - diffusion(p, f, x - delta)) / (2 * delta);
  CHECK(close_rel(diffusion_deriv(p, f, x), fd, 1e-6));
}

TEST_CASE("phi and its zero limit") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  CHECK(phi_limit_zero(p, f) == 1000.0);
  // (1000-500)/(1+0.01*500) = 500/6 by hand.
  CHECK(close_rel(phi(p, f, 500.0), 500.0 / 6.0, 1e-12));
  CHECK(phi(p, f, p.N * (1 - 1e-12)) < 1e-6);
  CHECK_THROWS_AS(phi(p, f, 0.0), std::domain_error);
  CHECK_THROWS_AS(phi(p, f, p.N), std::domain_error);
  // The small-x expansion matches the ratio form where both are sound.
  const double x_small = 2e-8 * p.N;
  CHECK(close_rel(phi(p, f, x_small), f.eval(x_small) / x_small * (p.N - x_small), 1e-9));
}

TEST_CASE("log-generator direct value") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  // phi(100) = 450; 0.0008*450 - 0.1001 - 0.5e-6*450^2 = 0.15865 by hand.
  CHECK(close_rel(lyapunov_ln_direct(p, f, 100.0), 0.15865, 1e-12));
  // At x near N, phi -> 0 so the value tends to -(gamma+mu).
  CHECK(close_rel(lyapunov_ln_direct(p, f, p.N * (1 - 1e-10)), -(p.gamma + p.mu), 1e-6));
}

TEST_CASE("roots of the phi quadratic") {
  const ModelParams p = test::persistence_params_h1();
  const LyapunovRoots r = lyapunov_roots(p);
  // beta^2 - 2 sigma^2 (gamma+mu) = 6.4e-7 - 2.002e-7 by hand.
  CHECK(close_rel(r.discriminant, 4.398e-7, 1e-12));
  CHECK(close_rel(r.r_minus, 136.8258, 1e-5));
  CHECK(close_rel(r.r_plus, 1463.1742, 1e-5));
  // Product identity: r- * r+ = 2(gamma+mu)/sigma^2.
  CHECK(close_rel(r.r_minus * r.r_plus, 2 * (p.gamma + p.mu) / (p.sigma * p.sigma), 1e-9));

  ModelParams loud = p;
  loud.sigma = 0.1;  // 2 sigma^2 (gamma+mu) > beta^2
  CHECK_THROWS_AS(lyapunov_roots(loud), RegimeError);
  try {
    lyapunov_roots(loud);
  } catch (const RegimeError& e) {
    CHECK(e.discriminant < 0.0);
  }

  ModelParams degenerate = p;
  degenerate.sigma = 0.0;
  CHECK_THROWS_AS(lyapunov_roots(degenerate), std::invalid_argument);
}

TEST_CASE("double root when the discriminant vanishes") {
  ModelParams p = test::persistence_params_h1();
  // sigma solving 2 sigma^2 (gamma+mu) = beta^2, nudged down one part in 1e12
  // so rounding cannot push the discriminant negative.
  p.sigma = p.beta / std::sqrt(2.0 * (p.gamma + p.mu)) * (1.0 - 1e-12);
  const LyapunovRoots r = lyapunov_roots(p);
  CHECK(r.discriminant >= 0.0);
  CHECK(close_rel(r.r_minus, r.r_plus, 1e-5));
  CHECK(close_rel(r.r_minus, p.beta / (p.sigma * p.sigma), 1e-5));
}

TEST_CASE("factored form agrees with the direct form") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  for (int i = 1; i <= 1000; ++i) {
    const double x = i * p.N / 1001.0;
    const double direct = lyapunov_ln_direct(p, f, x);
    const double factored = lyapunov_ln_factored(p, f, x);
    REQUIRE(std::abs(direct - factored) <= 1e-9 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("factored form vanishes at the roots") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const LyapunovRoots r = lyapunov_roots(p);
  // x with phi(x) = r_minus, via the test-side bisection oracle.
  const double x_root = test::bisect(
      [&](double x) { return phi(p, f, x) - r.r_minus; }, 1e-6, p.N - 1e-6);
  CHECK(std::abs(lyapunov_ln_factored(p, f, x_root)) < 1e-12);
  CHECK(std::abs(lyapunov_ln_direct(p, f, x_root)) < 1e-12);
}

TEST_CASE("factored form error cases") {
  const IncidenceFunction f = test::default_h1();
  ModelParams loud = test::persistence_params_h1();
  loud.sigma = 0.1;
  CHECK_THROWS_AS(lyapunov_ln_factored(loud, f, 100.0), RegimeError);
  ModelParams degenerate = test::persistence_params_h1();
  degenerate.sigma = 0.0;
  CHECK_THROWS_AS(lyapunov_ln_factored(degenerate, f, 100.0), std::invalid_argument);
}

TEST_CASE("general generator with V = ln matches the direct form") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const ScalarC2 log_v{[](double x) { return 1.0 / x; },
                       [](double x) { return -1.0 / (x * x); }};
  for (double x : {1.0, 10.0, 100.0, 500.0, 999.0}) {
    CHECK(close_rel(lyapunov_general(p, f, log_v, x), lyapunov_ln_direct(p, f, x), 1e-12));
  }
}

TEST_CASE("general generator on a constant is zero") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const ScalarC2 constant{[](double) { return 0.0; }, [](double) { return 0.0; }};
  CHECK(lyapunov_general(p, f, constant, 123.0) == 0.0);
}

TEST_CASE("barrier function bound from the invariance argument") {
  // V(x) = 1/x + 1/(N-x): the generator satisfies LV <= c V on (0,N) with
  // c = max{gamma+mu+sigma^2 h'(0)^2 N^2, beta k_h + sigma^2 k_h^2}.
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  const double N = p.N;
  const ScalarC2 barrier{
      [N](double x) { return -1.0 / (x * x) + 1.0 / ((N - x) * (N - x)); },
      [N](double x) { return 2.0 / (x * x * x) + 2.0 / ((N - x) * (N - x) * (N - x)); }};
  const double hp0 = f.slope_at_zero;
  const double kh = f.sup_bound;
  const double c = std::max(p.gamma + p.mu + p.sigma * p.sigma * hp0 * hp0 * N * N,
                            p.beta * kh + p.sigma * p.sigma * kh * kh);
  for (int i = 1; i <= 2000; ++i) {
    const double x = i * N / 2001.0;
    const double v = 1.0 / x + 1.0 / (N - x);
    REQUIRE(lyapunov_general(p, f, barrier, x) <= c * v * (1 + 1e-12));
  }
}

TEST_CASE("phi decreases for h1 on a fine grid") {
  const ModelParams p = test::persistence_params_h1();
  const IncidenceFunction f = test::default_h1();
  double prev = phi(p, f, p.N / 10001.0);
  for (int i = 2; i <= 10000; ++i) {
    const double cur = phi(p, f, i * p.N / 10001.0);
    REQUIRE(cur < prev);
    prev = cur;
  }
}

TEST_CASE("factorization identity over random admissible parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int accepted = 0;
  while (accepted < 20) {
    ModelParams p;
    p.beta = std::pow(10.0, -4.5 + 2.0 * unif(rng));
    p.gamma = 0.2 * unif(rng);
    p.mu = 0.1 * unif(rng);
    p.sigma = std::pow(10.0, -3.5 + 1.5 * unif(rng));
    p.N = 500.0 + 1500.0 * unif(rng);
    if (p.gamma + p.mu <= 0.0) continue;
    if (p.beta * p.beta <= 2.0 * p.sigma * p.sigma * (p.gamma + p.mu)) continue;
    ++accepted;
    const IncidenceFunction f = make_h1(0.5 + unif(rng), 0.001 + 0.02 * unif(rng));
    for (int i = 1; i <= 100; ++i) {
      const double x = i * p.N / 101.0;
      const double direct = lyapunov_ln_direct(p, f, x);
      const double factored = lyapunov_ln_factored(p, f, x);
      REQUIRE(std::abs(direct - factored) <= 1e-9 * (1.0 + std::abs(direct)));
    }
  }
}
