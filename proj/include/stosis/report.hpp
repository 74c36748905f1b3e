#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stosis/analysis.hpp"
#include "stosis/config.hpp"
#include "stosis/ensemble.hpp"
#include "stosis/incidence.hpp"
#include "stosis/sim.hpp"

namespace stosis {

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const LyapunovRoots& r);
nlohmann::json to_json(const Condition& c);
nlohmann::json to_json(const BracketCondition& c);
nlohmann::json to_json(const RegimeReport& r);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const Histogram& h);
nlohmann::json to_json(const EnsembleSummary& s);  // wall-clock metrics excluded
nlohmann::json to_json(const RunConfig& cfg);      // resolved-config echo

std::string format_sig17(double v);  // shortest 17-significant-digit form

// CSV emission; numeric fields use 17 significant digits and round-trip.
void write_trajectory_csv(const std::string& path, const Trajectory& tr);
Trajectory read_trajectory_csv(const std::string& path);
void write_histogram_csv(const std::string& path, const Histogram& h);
void write_lyapunov_csv(const std::string& path, const std::vector<double>& xs,
                        const std::vector<double>& direct, const std::vector<double>& factored);

void write_text_file(const std::string& path, const std::string& content);

// Minimal static SVG plots (fixed styling, data-driven).
void write_svg_line(const std::string& path, const std::vector<double>& xs,
                    const std::vector<double>& ys, const std::string& title);
void write_svg_histogram(const std::string& path, const Histogram& h, const std::string& title);

}  // namespace stosis
