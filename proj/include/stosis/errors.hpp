#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace stosis {

// Configuration / input validation problems. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested quantity is undefined in the current parameter regime
// (e.g. negative discriminant, persistence hypotheses violated). CLI exit code 3.
struct RegimeError : std::runtime_error {
  explicit RegimeError(const std::string& what,
                       double discriminant = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), discriminant(discriminant) {}
  double discriminant;
};

// Numerical blow-up or instability during integration. CLI exit code 4.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& what, std::int64_t step = -1)
      : std::runtime_error(what), step(step) {}
  std::int64_t step;
};

}  // namespace stosis
