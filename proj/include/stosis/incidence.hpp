#pragma once

#include <functional>
#include <string>
#include <vector>

namespace stosis {

/// Non-linear incidence response h. The contract: h(0) = 0, h >= 0, h bounded
/// by sup_bound, h'(0) = slope_at_zero > 0, and h(x) <= slope_at_zero * x.
/// Instances are immutable after construction and safe to share across threads.
///
/// Extension point: a custom family is just a filled-in IncidenceFunction;
/// run it through validate_incidence to check the contract before use. The
/// config file only knows the two shipped families.
struct IncidenceFunction {
  std::function<double(double)> eval;   // h(x) for x >= 0
  std::function<double(double)> deriv;  // dh/dx
  double slope_at_zero = 0.0;           // h'(0)
  double sup_bound = 0.0;               // k_h with h(x) <= k_h for all x >= 0
  std::string label;
};

/// Saturating incidence h1(x) = kappa*x / (1 + alpha*x), monotone increasing,
/// sup_bound = kappa/alpha. Throws std::invalid_argument on non-positive input.
IncidenceFunction make_h1(double kappa, double alpha);

/// Non-monotone incidence h2(x) = kappa*x / (1 + alpha*x^2); unimodal with
/// maximum kappa/(2*sqrt(alpha)) at x = 1/sqrt(alpha), vanishing at infinity.
IncidenceFunction make_h2(double kappa, double alpha);

struct PropertyResult {
  std::string property;
  bool pass = false;
  double worst_x = 0.0;  // sample with the smallest margin
  double margin = 0.0;   // signed slack of the inequality; negative = violated
};

struct ValidationReport {
  std::string label;
  bool all_pass = false;
  std::vector<PropertyResult> properties;
};

/// Grid-based check of the incidence contract (the five properties plus
/// eval/deriv finite-difference consistency). Samples x = 0 and n_points
/// log-spaced points in (0, x_max]. Failures are reported, never thrown.
ValidationReport validate_incidence(const IncidenceFunction& f, double x_max, int n_points);

}  // namespace stosis
