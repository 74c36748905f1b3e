#pragma once

#include <cmath>
#include <vector>

#include "stosis/incidence.hpp"
#include "stosis/model.hpp"

namespace stosis::test {

// Parameter sets used throughout the suites (transmission/removal/noise/N).

// Extinction regime, saturating incidence.
inline ModelParams extinction_params_h1() {
  return ModelParams{1e-5, 0.1, 1e-4, 9e-5, 1000.0};
}

// Persistence regime, saturating incidence.
inline ModelParams persistence_params_h1() {
  return ModelParams{8e-4, 0.1, 1e-4, 1e-3, 1000.0};
}

// Extinction regime, non-monotone incidence.
inline ModelParams extinction_params_h2() {
  return ModelParams{1e-4, 0.1, 0.05, 9e-4, 1000.0};
}

// Persistence regime, non-monotone incidence.
inline ModelParams persistence_params_h2() {
  return ModelParams{9.9e-4, 0.1, 0.05, 1e-3, 1000.0};
}

inline IncidenceFunction default_h1() { return make_h1(1.0, 0.01); }
inline IncidenceFunction default_h2() { return make_h2(1.0, 1e-4); }

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool close_abs(double a, double b, double abs_tol) { return std::abs(a - b) <= abs_tol; }

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Slope of log(err) against log(dt): the observed convergence order.
inline double log_log_slope(const std::vector<double>& dts, const std::vector<double>& errs) {
  std::vector<double> lx(dts.size()), ly(errs.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    lx[i] = std::log(dts[i]);
    ly[i] = std::log(errs[i]);
  }
  return fit_slope(lx, ly);
}

// Bisection root of g on [lo,hi]; test-side oracle, independent of the library
// solvers.
template <class G>
double bisect(G&& g, double lo, double hi, int iters = 200) {
  double glo = g(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace stosis::test
