#pragma once

#include <limits>
#include <optional>
#include <string>

#include "stosis/model.hpp"

namespace stosis {

enum class Verdict { stable_dfe, extinction, persistence_unique_stationary, inconclusive };

const char* to_string(Verdict v);

/// One evaluated sufficient condition with both sides of the inequality kept.
struct Condition {
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  bool holds = false;
  bool applicable = true;  // false when sigma = 0 makes the condition meaningless
};

/// Two-sided condition lower < value < upper.
struct BracketCondition {
  double lower = std::numeric_limits<double>::quiet_NaN();
  double value = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();
  bool holds = false;
  bool applicable = true;
};

struct RegimeReport {
  // h'(0) < ((gamma+mu) - sigma^2 h'(0)^2 N^2 / 2) / (beta N)
  Condition stability;
  // h'(0) < (gamma+mu) / ((beta + sigma^2 k_h) N)
  Condition extinction;
  // beta/(sigma^2 N) < h'(0) < (beta + sqrt(disc))/(sigma^2 N) = r_plus/N
  BracketCondition persistence_bracket;
  // beta^2 > 2 sigma^2 (gamma+mu); lhs = beta^2, rhs = 2 sigma^2 (gamma+mu)
  Condition persistence_noise;
  // phi strictly decreasing on a grid; lhs = worst consecutive phi increment
  Condition persistence_phi_decreasing;

  std::optional<LyapunovRoots> roots;  // present when sigma > 0 and disc >= 0
  std::optional<double> xi;            // present when all persistence hypotheses hold
  std::optional<double> m;             // maximizer of the log generator, in (0, xi)

  Verdict verdict = Verdict::inconclusive;

  bool persistence_all() const {
    return persistence_bracket.applicable && persistence_bracket.holds &&
           persistence_noise.holds && persistence_phi_decreasing.holds;
  }
};

/// Evaluates every sufficient condition independently and derives the verdict.
/// Never throws on valid parameters; with sigma = 0 the stochastic persistence
/// machinery is reported as not applicable.
RegimeReport classify_regime(const ModelParams& p, const IncidenceFunction& f);

/// Endemic level: the root of phi(xi) = r_minus in (0,N), by bisection, with
/// |phi(xi) - r_minus| <= 1e-10 * r_minus (or the floating-point resolution of
/// the bracket, whichever is reachable). Throws RegimeError unless all three
/// persistence hypotheses hold.
double solve_xi(const ModelParams& p, const IncidenceFunction& f);

/// Maximizer of the log generator on (0, xi), by golden-section search to
/// 1e-9*N. Throws RegimeError if the maximum fails the shape contract.
double find_mode_m(const ModelParams& p, const IncidenceFunction& f, double xi);

struct RegionCheck {
  bool monotone_ok = true;
  bool sign_ok = true;
  double first_violation_x = std::numeric_limits<double>::quiet_NaN();
};

struct ShapeReport {
  bool applicable = false;  // false when the persistence hypotheses fail
  std::string not_applicable_reason;
  double xi = std::numeric_limits<double>::quiet_NaN();
  double m = std::numeric_limits<double>::quiet_NaN();
  RegionCheck rising;    // (0,m): increasing and positive
  RegionCheck falling;   // (m,xi): decreasing and positive
  RegionCheck negative;  // (xi,N): decreasing and negative
  bool single_sign_change = false;
  double sign_change_lo = std::numeric_limits<double>::quiet_NaN();
  double sign_change_hi = std::numeric_limits<double>::quiet_NaN();

  bool pass() const {
    return applicable && rising.monotone_ok && rising.sign_ok && falling.monotone_ok &&
           falling.sign_ok && negative.monotone_ok && negative.sign_ok && single_sign_change;
  }
};

/// Verifies the three shape properties of the log generator on an n_grid grid
/// over (0,N). Violations are reported, not thrown; inapplicable regimes are
/// flagged with a reason.
ShapeReport lyapunov_shape_check(const ModelParams& p, const IncidenceFunction& f, int n_grid);

/// Expected-entry-time bound into (a,b) from x0, with 0 < a < xi < b < N and
/// x0 in (0,a] or [b,N): ln(a/x0)/min{L(0+), L(a)} below, ln(N/b)/|L(b)| above.
/// Throws std::domain_error when x0 is already inside (a,b) or the interval is
/// misplaced, RegimeError outside the persistence regime.
double hitting_time_bound(const ModelParams& p, const IncidenceFunction& f,
                          double a, double b, double x0);

/// True iff phi strictly decreases across all consecutive pairs of an n_grid
/// uniform grid on (0,N). Requires n_grid >= 100.
bool check_phi_decreasing(const ModelParams& p, const IncidenceFunction& f, int n_grid);

}  // namespace stosis
