#pragma once

#include "stosis/config.hpp"

namespace stosis {

// Exit codes shared by the CLI and the command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRegime = 3;
inline constexpr int kExitNumerics = 4;

int cmd_classify(const RunConfig& cfg);
int cmd_xi(const RunConfig& cfg);
int cmd_lyapunov(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_ensemble(const RunConfig& cfg);
int cmd_stationary(const RunConfig& cfg);

/// Dispatches on cfg.experiment.kind; exceptions propagate to the caller.
int run_experiment(const RunConfig& cfg);

}  // namespace stosis
