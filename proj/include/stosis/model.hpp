#pragma once

#include <functional>

#include "stosis/incidence.hpp"

namespace stosis {

struct ModelParams {
  double beta = 0.0;   // transmission coefficient, > 0
  double gamma = 0.0;  // per-capita recovery rate, >= 0
  double mu = 0.0;     // per-capita birth/death rate, >= 0
  double sigma = 0.0;  // transmission noise intensity, >= 0
  double N = 0.0;      // total population (biomass), > 0

  double removal_rate() const { return gamma + mu; }

  // Throws ConfigError if beta <= 0, N <= 0, sigma < 0, gamma < 0, mu < 0,
  // or gamma + mu == 0.
  void validate() const;
};

// Roots of beta*r - (gamma+mu) - (sigma^2/2) r^2 = 0 in the phi variable.
struct LyapunovRoots {
  double r_minus = 0.0;
  double r_plus = 0.0;
  double discriminant = 0.0;  // beta^2 - 2 sigma^2 (gamma+mu)
};

/// b(x) = beta*h(x)*(N-x) - (gamma+mu)*x, defined on [0,N].
double drift(const ModelParams& p, const IncidenceFunction& f, double x);

/// sigma*h(x)*(N-x), defined on [0,N]; vanishes at both endpoints.
double diffusion(const ModelParams& p, const IncidenceFunction& f, double x);

/// d/dx of the diffusion coefficient: sigma*(h'(x)*(N-x) - h(x)).
double diffusion_deriv(const ModelParams& p, const IncidenceFunction& f, double x);

/// phi(x) = h(x)/x * (N-x) on (0,N). Use phi_limit_zero for the 0+ limit.
double phi(const ModelParams& p, const IncidenceFunction& f, double x);

/// Continuous extension of phi at 0+: h'(0)*N.
double phi_limit_zero(const ModelParams& p, const IncidenceFunction& f);

/// Generator applied to ln: beta*phi(x) - (gamma+mu) - (sigma^2/2)*phi(x)^2.
double lyapunov_ln_direct(const ModelParams& p, const IncidenceFunction& f, double x);

/// The same quantity at the 0+ limit, phi replaced by h'(0)*N.
double lyapunov_ln_limit_zero(const ModelParams& p, const IncidenceFunction& f);

/// Factored form -(sigma^2/2)(phi(x)-r_plus)(phi(x)-r_minus). Requires
/// sigma > 0 (std::invalid_argument otherwise) and a non-negative
/// discriminant (RegimeError otherwise). Agrees with lyapunov_ln_direct.
double lyapunov_ln_factored(const ModelParams& p, const IncidenceFunction& f, double x);

/// r_minus <= r_plus; throws std::invalid_argument when sigma == 0 and
/// RegimeError (carrying the discriminant) when beta^2 < 2 sigma^2 (gamma+mu).
LyapunovRoots lyapunov_roots(const ModelParams& p);

/// Twice-differentiable scalar test function for the generator.
struct ScalarC2 {
  std::function<double(double)> d1;  // V'
  std::function<double(double)> d2;  // V''
};

/// Generator on a caller-supplied V: b(x)V'(x) + (1/2) diffusion(x)^2 V''(x).
double lyapunov_general(const ModelParams& p, const IncidenceFunction& f,
                        const ScalarC2& v, double x);

namespace detail {

// Shared formula kernels; no domain guards. h_at_x must equal f.eval(x).
inline double drift_from_h(const ModelParams& p, double h_at_x, double x) {
  return p.beta * h_at_x * (p.N - x) - (p.gamma + p.mu) * x;
}

inline double noise_amp_from_h(const ModelParams& p, double h_at_x, double x) {
  return p.sigma * h_at_x * (p.N - x);
}

// phi with the small-x expansion h'(0)*(N-x); avoids 0/0 near extinction.
inline double phi_safe(const ModelParams& p, const IncidenceFunction& f, double x) {
  if (x < 1e-8 * p.N) return f.slope_at_zero * (p.N - x);
  return f.eval(x) / x * (p.N - x);
}

inline double lyapunov_of_phi(const ModelParams& p, double phi_value) {
  return p.beta * phi_value - (p.gamma + p.mu) - 0.5 * p.sigma * p.sigma * phi_value * phi_value;
}

}  // namespace detail

}  // namespace stosis
