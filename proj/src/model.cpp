#include "stosis/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stosis/errors.hpp"

namespace stosis {

namespace {

void check_closed(double x, double N, const char* fn) {
  if (!(x >= 0.0 && x <= N))
    throw std::domain_error(std::string(fn) + ": x = " + std::to_string(x) +
                            " outside [0,N] with N = " + std::to_string(N));
}

void check_open(double x, double N, const char* fn) {
  if (!(x > 0.0 && x < N))
    throw std::domain_error(std::string(fn) + ": x = " + std::to_string(x) +
                            " outside (0,N) with N = " + std::to_string(N));
}

}  // namespace

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("model parameters: " + msg); };
  if (!std::isfinite(beta) || beta <= 0.0) fail("beta must be positive");
  if (!std::isfinite(N) || N <= 0.0) fail("N must be positive");
  if (!std::isfinite(gamma) || gamma < 0.0) fail("gamma must be non-negative");
  if (!std::isfinite(mu) || mu < 0.0) fail("mu must be non-negative");
  if (!std::isfinite(sigma) || sigma < 0.0) fail("sigma must be non-negative");
  if (gamma + mu <= 0.0) fail("gamma + mu must be positive");
}

double drift(const ModelParams& p, const IncidenceFunction& f, double x) {
  check_closed(x, p.N, "drift");
  return detail::drift_from_h(p, f.eval(x), x);
}

double diffusion(const ModelParams& p, const IncidenceFunction& f, double x) {
  check_closed(x, p.N, "diffusion");
  return detail::noise_amp_from_h(p, f.eval(x), x);
}

double diffusion_deriv(const ModelParams& p, const IncidenceFunction& f, double x) {
  check_closed(x, p.N, "diffusion_deriv");
  return p.sigma * (f.deriv(x) * (p.N - x) - f.eval(x));
}

double phi(const ModelParams& p, const IncidenceFunction& f, double x) {
  check_open(x, p.N, "phi");
  return detail::phi_safe(p, f, x);
}

double phi_limit_zero(const ModelParams& p, const IncidenceFunction& f) {
  return f.slope_at_zero * p.N;
}

double lyapunov_ln_direct(const ModelParams& p, const IncidenceFunction& f, double x) {
  check_open(x, p.N, "lyapunov_ln_direct");
  return detail::lyapunov_of_phi(p, detail::phi_safe(p, f, x));
}

double lyapunov_ln_limit_zero(const ModelParams& p, const IncidenceFunction& f) {
  return detail::lyapunov_of_phi(p, phi_limit_zero(p, f));
}

LyapunovRoots lyapunov_roots(const ModelParams& p) {
  if (!(p.sigma > 0.0))
    throw std::invalid_argument("lyapunov_roots: sigma = 0 is degenerate, roots undefined");
  const double s2 = p.sigma * p.sigma;
  const double disc = p.beta * p.beta - 2.0 * s2 * (p.gamma + p.mu);
  if (disc < 0.0)
    throw RegimeError("lyapunov_roots: discriminant " + std::to_string(disc) +
                          " is negative; beta^2 < 2 sigma^2 (gamma+mu)",
                      disc);
  const double root = std::sqrt(disc);
  return LyapunovRoots{(p.beta - root) / s2, (p.beta + root) / s2, disc};
}

double lyapunov_ln_factored(const ModelParams& p, const IncidenceFunction& f, double x) {
  check_open(x, p.N, "lyapunov_ln_factored");
  const LyapunovRoots roots = lyapunov_roots(p);
  const double ph = detail::phi_safe(p, f, x);
  return -0.5 * p.sigma * p.sigma * (ph - roots.r_plus) * (ph - roots.r_minus);
}

double lyapunov_general(const ModelParams& p, const IncidenceFunction& f, const ScalarC2& v,
                        double x) {
  check_open(x, p.N, "lyapunov_general");
  const double hx = f.eval(x);
  const double amp = detail::noise_amp_from_h(p, hx, x);
  return detail::drift_from_h(p, hx, x) * v.d1(x) + 0.5 * amp * amp * v.d2(x);
}

}  // namespace stosis
