#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stosis/commands.hpp"
#include "stosis/errors.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string output_dir;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string format;
  bool svg = false;
};

void apply_overrides(stosis::RunConfig& cfg, const CliOptions& opt) {
  if (!opt.output_dir.empty()) cfg.output.directory = opt.output_dir;
  if (opt.workers > 0) cfg.workers = opt.workers;
  if (opt.seed_set) cfg.experiment.sim.seed = opt.seed;
  if (!opt.format.empty()) {
    if (opt.format == "csv") {
      cfg.output.csv = true;
      cfg.output.json = false;
    } else if (opt.format == "json") {
      cfg.output.csv = false;
      cfg.output.json = true;
    } else if (opt.format == "both") {
      cfg.output.csv = cfg.output.json = true;
    } else {
      throw stosis::ConfigError("--format must be csv, json or both");
    }
  }
  if (opt.svg) cfg.output.svg = true;
}

int emit_error(const char* type, const std::string& message, int code) {
  nlohmann::json j{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
  std::cout << j.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic SIS simulation and regime analysis"};
  app.require_subcommand(1);

  CliOptions opt;
  const char* kinds[] = {"classify", "xi", "lyapunov", "simulate", "ensemble", "stationary"};
  const char* descriptions[] = {
      "evaluate the regime conditions and emit the full report",
      "solve for the endemic level and the generator maximizer",
      "tabulate the log generator (direct and factored) over (0,N)",
      "integrate a single trajectory (rk4 | euler_maruyama | milstein)",
      "run a Monte Carlo ensemble and summarize it",
      "estimate the stationary distribution histogram"};
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(kinds[i], descriptions[i]);
    sub->add_option("--config", opt.config_path, "path to the run config")->required();
    sub->add_option("--output", opt.output_dir, "output directory (overrides config)");
    sub->add_option("--workers", opt.workers, "ensemble worker cap (default: all cores)");
    sub->add_option("--seed", opt.seed, "seed override")->trigger_on_parse()->each([&](const std::string&) {
      opt.seed_set = true;
    });
    sub->add_option("--format", opt.format, "csv | json | both");
    sub->add_flag("--svg", opt.svg, "also emit static SVG plots");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string requested = app.get_subcommands().front()->get_name();

  try {
    stosis::RunConfig cfg = stosis::load_config_file(opt.config_path);
    if (stosis::to_string(cfg.experiment.kind) != requested)
      throw stosis::ConfigError("subcommand '" + requested + "' does not match experiment [" +
                                stosis::to_string(cfg.experiment.kind) + "] in " +
                                opt.config_path);
    apply_overrides(cfg, opt);
    return stosis::run_experiment(cfg);
  } catch (const stosis::ConfigError& e) {
    return emit_error("config", e.what(), stosis::kExitConfig);
  } catch (const stosis::RegimeError& e) {
    return emit_error("regime", e.what(), stosis::kExitRegime);
  } catch (const stosis::NumericsError& e) {
    return emit_error("numerics", e.what(), stosis::kExitNumerics);
  } catch (const std::invalid_argument& e) {
    return emit_error("config", e.what(), stosis::kExitConfig);
  } catch (const std::domain_error& e) {
    return emit_error("config", e.what(), stosis::kExitConfig);
  } catch (const std::exception& e) {
    return emit_error("internal", e.what(), stosis::kExitNumerics);
  }
}
