#include "stosis/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "stosis/errors.hpp"

namespace stosis {

namespace {

constexpr int kPhiScanGrid = 1000;  // default grid for the monotonicity hypothesis

// Worst consecutive phi increment on a uniform grid over (0,N); strictly
// decreasing means the worst increment is still negative.
std::pair<bool, double> phi_monotone_scan(const ModelParams& p, const IncidenceFunction& f,
                                          int n_grid) {
  double worst = -std::numeric_limits<double>::infinity();
  double prev = detail::phi_safe(p, f, p.N / (n_grid + 1));
  bool decreasing = true;
  for (int i = 2; i <= n_grid; ++i) {
    const double x = static_cast<double>(i) * p.N / (n_grid + 1);
    const double cur = detail::phi_safe(p, f, x);
    const double inc = cur - prev;
    if (inc > worst) worst = inc;
    if (!(cur < prev)) decreasing = false;
    prev = cur;
  }
  return {decreasing, worst};
}

struct PersistenceHypotheses {
  bool bracket = false;
  bool noise = false;
  bool phi_decreasing = false;
  bool all() const { return bracket && noise && phi_decreasing; }
};

PersistenceHypotheses evaluate_hypotheses(const ModelParams& p, const IncidenceFunction& f,
                                          const LyapunovRoots& roots) {
  PersistenceHypotheses hy;
  const double s2N = p.sigma * p.sigma * p.N;
  const double lower = p.beta / s2N;
  const double upper = (p.beta + std::sqrt(roots.discriminant)) / s2N;
  hy.bracket = lower < f.slope_at_zero && f.slope_at_zero < upper;
  hy.noise = roots.discriminant > 0.0;
  hy.phi_decreasing = phi_monotone_scan(p, f, kPhiScanGrid).first;
  return hy;
}

// Throws RegimeError unless all three persistence hypotheses hold; returns roots.
LyapunovRoots require_persistence(const ModelParams& p, const IncidenceFunction& f) {
  if (!(p.sigma > 0.0))
    throw RegimeError("persistence hypotheses require sigma > 0");
  const LyapunovRoots roots = lyapunov_roots(p);  // RegimeError when disc < 0
  const PersistenceHypotheses hy = evaluate_hypotheses(p, f, roots);
  if (!hy.noise)
    throw RegimeError("persistence hypothesis 2 fails: beta^2 <= 2 sigma^2 (gamma+mu)",
                      roots.discriminant);
  if (!hy.bracket)
    throw RegimeError("persistence hypothesis 1 fails: h'(0) outside the bracket "
                      "(beta/(sigma^2 N), r_plus/N)",
                      roots.discriminant);
  if (!hy.phi_decreasing)
    throw RegimeError("persistence hypothesis 3 fails: phi is not strictly decreasing on (0,N)",
                      roots.discriminant);
  return roots;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable_dfe: return "STABLE_DFE";
    case Verdict::extinction: return "EXTINCTION";
    case Verdict::persistence_unique_stationary: return "PERSISTENCE_UNIQUE_STATIONARY";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

bool check_phi_decreasing(const ModelParams& p, const IncidenceFunction& f, int n_grid) {
  if (n_grid < 100) throw std::invalid_argument("check_phi_decreasing: n_grid must be >= 100");
  return phi_monotone_scan(p, f, n_grid).first;
}

RegimeReport classify_regime(const ModelParams& p, const IncidenceFunction& f) {
  p.validate();
  RegimeReport rep;
  const double hp0 = f.slope_at_zero;
  const double kh = f.sup_bound;
  const double gm = p.gamma + p.mu;
  const double s2 = p.sigma * p.sigma;

  rep.stability.lhs = hp0;
  rep.stability.rhs = (gm - 0.5 * s2 * hp0 * hp0 * p.N * p.N) / (p.beta * p.N);
  rep.stability.holds = rep.stability.lhs < rep.stability.rhs;

  rep.extinction.lhs = hp0;
  rep.extinction.rhs = gm / ((p.beta + s2 * kh) * p.N);
  rep.extinction.holds = rep.extinction.lhs < rep.extinction.rhs;

  const auto [phi_dec, worst_inc] = phi_monotone_scan(p, f, kPhiScanGrid);
  rep.persistence_phi_decreasing.lhs = worst_inc;
  rep.persistence_phi_decreasing.rhs = 0.0;
  rep.persistence_phi_decreasing.holds = phi_dec;

  if (p.sigma > 0.0) {
    const double disc = p.beta * p.beta - 2.0 * s2 * gm;
    rep.persistence_noise.lhs = p.beta * p.beta;
    rep.persistence_noise.rhs = 2.0 * s2 * gm;
    rep.persistence_noise.holds = disc > 0.0;

    if (disc >= 0.0) {
      rep.roots = lyapunov_roots(p);
      rep.persistence_bracket.lower = p.beta / (s2 * p.N);
      rep.persistence_bracket.value = hp0;
      rep.persistence_bracket.upper = rep.roots->r_plus / p.N;
      rep.persistence_bracket.holds = rep.persistence_bracket.lower < hp0 &&
                                      hp0 < rep.persistence_bracket.upper;
    } else {
      rep.persistence_bracket.applicable = false;
    }
  } else {
    rep.persistence_noise.applicable = false;
    rep.persistence_bracket.applicable = false;
    rep.persistence_phi_decreasing.applicable = false;
  }

  if (rep.persistence_all()) {
    rep.xi = solve_xi(p, f);
    rep.m = find_mode_m(p, f, *rep.xi);
    rep.verdict = Verdict::persistence_unique_stationary;
  } else if (rep.extinction.holds) {
    rep.verdict = Verdict::extinction;  // stronger claim than stability when both hold
  } else if (rep.stability.holds) {
    rep.verdict = Verdict::stable_dfe;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

double solve_xi(const ModelParams& p, const IncidenceFunction& f) {
  const LyapunovRoots roots = require_persistence(p, f);
  const double target = roots.r_minus;

  double lo = p.N * 1e-12;
  double hi = p.N * (1.0 - 1e-12);
  double g_lo = detail::phi_safe(p, f, lo) - target;
  double g_hi = detail::phi_safe(p, f, hi) - target;
  if (!(g_lo > 0.0) || !(g_hi < 0.0))
    throw std::logic_error("solve_xi: bisection bracket invalid despite hypotheses");

  const double tol = 1e-10 * target;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double g = detail::phi_safe(p, f, mid) - target;
    if (std::abs(g) <= tol) return mid;
    if (g > 0.0)
      lo = mid;
    else
      hi = mid;
    // Stop at floating-point resolution when the relative target is below
    // what the bracket can represent.
    if (hi - lo <= std::abs(mid) * 4.0 * std::numeric_limits<double>::epsilon()) break;
  }
  return mid;
}

double find_mode_m(const ModelParams& p, const IncidenceFunction& f, double xi) {
  if (!(xi > 0.0 && xi < p.N))
    throw std::invalid_argument("find_mode_m: xi must lie in (0,N)");
  auto value = [&](double x) { return detail::lyapunov_of_phi(p, detail::phi_safe(p, f, x)); };

  // Golden-section maximization on (0, xi); the log generator is unimodal
  // there when the persistence hypotheses hold.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = xi * 1e-12;
  double b = xi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = value(c);
  double fd = value(d);
  const double tol = 1e-9 * p.N;
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = value(d);
    }
  }
  const double m = 0.5 * (a + b);
  if (!(m > 0.0 && m < xi) || !(value(m) > 0.0))
    throw RegimeError("find_mode_m: maximizer violates the shape contract "
                      "(expected 0 < m < xi with positive maximum)");
  return m;
}

ShapeReport lyapunov_shape_check(const ModelParams& p, const IncidenceFunction& f, int n_grid) {
  if (n_grid < 100) throw std::invalid_argument("lyapunov_shape_check: n_grid must be >= 100");
  ShapeReport rep;
  try {
    rep.xi = solve_xi(p, f);
    rep.m = find_mode_m(p, f, rep.xi);
  } catch (const RegimeError& e) {
    rep.applicable = false;
    rep.not_applicable_reason = e.what();
    return rep;
  }
  rep.applicable = true;

  std::vector<double> xs(static_cast<std::size_t>(n_grid));
  std::vector<double> ls(static_cast<std::size_t>(n_grid));
  for (int i = 0; i < n_grid; ++i) {
    xs[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) * p.N / (n_grid + 1);
    ls[static_cast<std::size_t>(i)] =
        detail::lyapunov_of_phi(p, detail::phi_safe(p, f, xs[static_cast<std::size_t>(i)]));
  }

  auto flag = [](RegionCheck& r, bool ok, double x) {
    if (!ok && r.monotone_ok && r.sign_ok) r.first_violation_x = x;
  };

  int sign_changes = 0;
  for (int i = 0; i + 1 < n_grid; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double x0 = xs[iu], x1 = xs[iu + 1];
    const double l0 = ls[iu], l1 = ls[iu + 1];
    const double slack = 1e-12 * (1.0 + std::abs(l0));

    if (x1 < rep.m) {
      if (!(l1 >= l0 - slack)) {
        flag(rep.rising, false, x1);
        rep.rising.monotone_ok = false;
      }
    } else if (x0 > rep.m && x1 < rep.xi) {
      if (!(l1 <= l0 + slack)) {
        flag(rep.falling, false, x1);
        rep.falling.monotone_ok = false;
      }
    } else if (x0 > rep.xi) {
      if (!(l1 <= l0 + slack)) {
        flag(rep.negative, false, x1);
        rep.negative.monotone_ok = false;
      }
    }

    if ((l0 > 0.0) != (l1 > 0.0)) {
      ++sign_changes;
      rep.sign_change_lo = x0;
      rep.sign_change_hi = x1;
    }
  }

  for (int i = 0; i < n_grid; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double x = xs[iu], l = ls[iu];
    // Sign requirements away from the cell that brackets xi.
    if (x < rep.xi) {
      RegionCheck& region = x < rep.m ? rep.rising : rep.falling;
      if (!(l > 0.0)) {
        flag(region, false, x);
        region.sign_ok = false;
      }
    } else if (x > rep.xi) {
      if (!(l < 0.0)) {
        flag(rep.negative, false, x);
        rep.negative.sign_ok = false;
      }
    }
  }

  rep.single_sign_change = sign_changes == 1 && rep.sign_change_lo <= rep.xi &&
                           rep.xi <= rep.sign_change_hi;
  return rep;
}

double hitting_time_bound(const ModelParams& p, const IncidenceFunction& f, double a, double b,
                          double x0) {
  require_persistence(p, f);
  const double xi = solve_xi(p, f);
  if (!(0.0 < a && a < xi && xi < b && b < p.N))
    throw std::domain_error("hitting_time_bound: need 0 < a < xi < b < N (xi = " +
                            std::to_string(xi) + ")");
  if (x0 > a && x0 < b)
    throw std::domain_error("hitting_time_bound: x0 already inside target interval (a,b)");
  if (!(x0 > 0.0 && x0 < p.N))
    throw std::domain_error("hitting_time_bound: x0 outside (0,N)");

  if (x0 <= a) {
    const double l_zero = lyapunov_ln_limit_zero(p, f);
    const double l_a = lyapunov_ln_direct(p, f, a);
    const double denom = std::min(l_zero, l_a);
    if (!(denom > 0.0))
      throw RegimeError("hitting_time_bound: non-positive denominator min{L(0+), L(a)} = " +
                        std::to_string(denom));
    return std::log(a / x0) / denom;
  }
  const double l_b = lyapunov_ln_direct(p, f, b);
  if (!(l_b < 0.0))
    throw RegimeError("hitting_time_bound: expected L(b) < 0, got " + std::to_string(l_b));
  return std::log(p.N / b) / std::abs(l_b);
}

}  // namespace stosis
