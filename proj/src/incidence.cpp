#include "stosis/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stosis {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0)
    throw std::invalid_argument(std::string(name) + " must be a positive real, got " +
                                std::to_string(v));
}

// Relative slack when comparing eval against its own analytic bounds.
constexpr double kBoundSlack = 1e-12;

}  // namespace

IncidenceFunction make_h1(double kappa, double alpha) {
  require_positive(kappa, "kappa");
  require_positive(alpha, "alpha");
  IncidenceFunction f;
  f.eval = [kappa, alpha](double x) { return kappa * x / (1.0 + alpha * x); };
  f.deriv = [kappa, alpha](double x) {
    const double d = 1.0 + alpha * x;
    return kappa / (d * d);
  };
  f.slope_at_zero = kappa;
  f.sup_bound = kappa / alpha;
  f.label = "h1-saturating";
  return f;
}

IncidenceFunction make_h2(double kappa, double alpha) {
  require_positive(kappa, "kappa");
  require_positive(alpha, "alpha");
  IncidenceFunction f;
  f.eval = [kappa, alpha](double x) { return kappa * x / (1.0 + alpha * x * x); };
  f.deriv = [kappa, alpha](double x) {
    const double d = 1.0 + alpha * x * x;
    return kappa * (1.0 - alpha * x * x) / (d * d);
  };
  f.slope_at_zero = kappa;
  f.sup_bound = kappa / (2.0 * std::sqrt(alpha));
  f.label = "h2-nonmonotone";
  return f;
}

ValidationReport validate_incidence(const IncidenceFunction& f, double x_max, int n_points) {
  if (!(x_max > 0.0)) throw std::invalid_argument("x_max must be positive");
  if (n_points < 10) throw std::invalid_argument("n_points must be at least 10");

  // Log-spaced grid over (0, x_max], nine decades below x_max.
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  const double x_lo = x_max * 1e-9;
  for (int i = 0; i < n_points; ++i)
    grid[static_cast<std::size_t>(i)] =
        x_lo * std::pow(x_max / x_lo, static_cast<double>(i) / (n_points - 1));

  ValidationReport report;
  report.label = f.label;

  auto track_min = [](PropertyResult& r, double margin, double x) {
    if (margin < r.margin) {
      r.margin = margin;
      r.worst_x = x;
    }
  };

  PropertyResult p1{"h(0) = 0", false, 0.0, 0.0};
  p1.margin = -std::abs(f.eval(0.0));
  p1.pass = f.eval(0.0) == 0.0;

  PropertyResult p2{"h >= 0", true, 0.0, std::numeric_limits<double>::infinity()};
  PropertyResult p3{"h <= sup_bound", true, 0.0, std::numeric_limits<double>::infinity()};
  PropertyResult p4{"slope_at_zero > 0", f.slope_at_zero > 0.0, 0.0, f.slope_at_zero};
  PropertyResult p5{"h(x) <= slope_at_zero * x", true, 0.0,
                    std::numeric_limits<double>::infinity()};
  PropertyResult p6{"deriv consistent with eval", true, 0.0,
                    std::numeric_limits<double>::infinity()};

  for (double x : grid) {
    const double hx = f.eval(x);
    track_min(p2, hx, x);
    track_min(p3, f.sup_bound * (1.0 + kBoundSlack) - hx, x);
    track_min(p5, f.slope_at_zero * x * (1.0 + kBoundSlack) - hx, x);

    const double delta = 1e-5 * std::max(1.0, x);
    const double fd = (f.eval(x + delta) - f.eval(x - delta)) / (2.0 * delta);
    const double dv = f.deriv(x);
    const double tol = 1e-6 * std::max(1.0, std::abs(dv));
    track_min(p6, tol - std::abs(dv - fd), x);
  }
  p2.pass = p2.margin >= 0.0;
  p3.pass = p3.margin >= 0.0;
  p5.pass = p5.margin >= 0.0;
  p6.pass = p6.margin >= 0.0;

  report.properties = {p1, p2, p3, p4, p5, p6};
  report.all_pass = std::all_of(report.properties.begin(), report.properties.end(),
                                [](const PropertyResult& r) { return r.pass; });
  return report;
}

}  // namespace stosis
