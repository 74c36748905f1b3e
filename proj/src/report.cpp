#include "stosis/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "stosis/errors.hpp"

namespace stosis {

using nlohmann::json;

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;  // JSON has no NaN/inf
}

}  // namespace

std::string format_sig17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const ModelParams& p) {
  return json{{"beta", p.beta}, {"gamma", p.gamma}, {"mu", p.mu}, {"sigma", p.sigma},
              {"N", p.N}};
}

json to_json(const LyapunovRoots& r) {
  return json{{"r_minus", r.r_minus}, {"r_plus", r.r_plus}, {"discriminant", r.discriminant}};
}

json to_json(const Condition& c) {
  return json{{"lhs", finite_or_null(c.lhs)},
              {"rhs", finite_or_null(c.rhs)},
              {"holds", c.holds},
              {"applicable", c.applicable}};
}

json to_json(const BracketCondition& c) {
  return json{{"lower", finite_or_null(c.lower)},
              {"value", finite_or_null(c.value)},
              {"upper", finite_or_null(c.upper)},
              {"holds", c.holds},
              {"applicable", c.applicable}};
}

json to_json(const RegimeReport& r) {
  json j{{"stability", to_json(r.stability)},
         {"extinction", to_json(r.extinction)},
         {"persistence_bracket", to_json(r.persistence_bracket)},
         {"persistence_noise", to_json(r.persistence_noise)},
         {"persistence_phi_decreasing", to_json(r.persistence_phi_decreasing)},
         {"verdict", to_string(r.verdict)}};
  j["roots"] = r.roots ? to_json(*r.roots) : json(nullptr);
  j["xi"] = r.xi ? json(*r.xi) : json(nullptr);
  j["m"] = r.m ? json(*r.m) : json(nullptr);
  return j;
}

json to_json(const ValidationReport& r) {
  json props = json::array();
  for (const PropertyResult& p : r.properties)
    props.push_back(json{{"property", p.property},
                         {"pass", p.pass},
                         {"worst_x", finite_or_null(p.worst_x)},
                         {"margin", finite_or_null(p.margin)}});
  return json{{"label", r.label}, {"all_pass", r.all_pass}, {"properties", props}};
}

json to_json(const Histogram& h) {
  return json{{"edges", h.edges}, {"masses", h.masses}, {"count", h.count}};
}

json to_json(const EnsembleSummary& s) {
  json j{{"terminal_states", s.terminal_states},
         {"extinction_fraction", s.extinction_fraction},
         {"post_burn_in_max", s.post_burn_in_max},
         {"post_burn_in_min", s.post_burn_in_min},
         {"histogram", to_json(s.histogram)},
         {"clamp_events", s.clamp_events},
         {"clamp_events_total", s.clamp_events_total},
         {"paths_with_clamps", s.paths_with_clamps}};
  if (!s.crossing_counts.empty()) j["crossing_counts"] = s.crossing_counts;
  if (s.hitting) {
    j["hitting"] = json{{"a", s.hitting->a},
                        {"b", s.hitting->b},
                        {"times", s.hitting->times},
                        {"censored", s.hitting->censored}};
  }
  return j;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["model"] = to_json(cfg.model);
  j["incidence"] = json{{"family", cfg.incidence.family},
                        {"kappa", cfg.incidence.kappa},
                        {"alpha", cfg.incidence.alpha}};
  json exp{{"kind", to_string(cfg.experiment.kind)}};
  switch (cfg.experiment.kind) {
    case ExperimentKind::classify:
    case ExperimentKind::xi:
      break;
    case ExperimentKind::lyapunov:
      exp["grid_points"] = cfg.experiment.grid_points;
      break;
    case ExperimentKind::simulate:
    case ExperimentKind::ensemble:
    case ExperimentKind::stationary: {
      const SimConfig& s = cfg.experiment.sim;
      exp["x0"] = s.x0;
      exp["t_end"] = s.t_end;
      exp["dt"] = s.dt;
      exp["scheme"] = to_string(s.scheme);
      exp["seed"] = s.seed;
      exp["clamp_eps"] = s.clamp_eps;
      exp["record_every"] = s.record_every;
      if (cfg.experiment.kind != ExperimentKind::simulate) {
        exp["n_trajectories"] = cfg.experiment.n_trajectories;
        exp["burn_in"] = cfg.experiment.burn_in;
        exp["histogram_bins"] = cfg.experiment.histogram_bins;
        exp["extinction_threshold"] = cfg.experiment.extinction_threshold;
        if (cfg.experiment.crossing_level) exp["crossing_level"] = *cfg.experiment.crossing_level;
        if (cfg.experiment.hitting_a && cfg.experiment.hitting_b) {
          exp["hitting_a"] = *cfg.experiment.hitting_a;
          exp["hitting_b"] = *cfg.experiment.hitting_b;
        }
        exp["write_trajectories"] = cfg.experiment.write_trajectories;
      }
      break;
    }
  }
  j["experiment"] = exp;
  // Output routing (directory, formats) is deliberately not part of the echo:
  // artifacts stay byte-identical when only the destination changes. The full
  // resolved configuration lives in the resolved_config.ini sidecar.
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
  std::ostringstream out;
  out << "t,x,martingale,clamped\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    out << format_sig17(tr.times[i]) << ',' << format_sig17(tr.values[i]) << ','
        << format_sig17(tr.martingale_values[i]) << ',' << int(tr.clamped[i]) << '\n';
  write_text_file(path, out.str());
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory csv '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "t,x,martingale,clamped")
    throw ConfigError("trajectory csv '" + path + "': bad header");
  Trajectory tr;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    double cols[3];
    for (double& col : cols) {
      if (!std::getline(row, field, ','))
        throw ConfigError("trajectory csv '" + path + "': truncated row");
      col = std::strtod(field.c_str(), nullptr);
    }
    if (!std::getline(row, field, ','))
      throw ConfigError("trajectory csv '" + path + "': truncated row");
    tr.times.push_back(cols[0]);
    tr.values.push_back(cols[1]);
    tr.martingale_values.push_back(cols[2]);
    tr.clamped.push_back(static_cast<std::uint8_t>(std::strtol(field.c_str(), nullptr, 10)));
  }
  return tr;
}

void write_histogram_csv(const std::string& path, const Histogram& h) {
  std::ostringstream out;
  out << "bin_left,bin_right,mass\n";
  for (std::size_t i = 0; i < h.masses.size(); ++i)
    out << format_sig17(h.edges[i]) << ',' << format_sig17(h.edges[i + 1]) << ','
        << format_sig17(h.masses[i]) << '\n';
  write_text_file(path, out.str());
}

void write_lyapunov_csv(const std::string& path, const std::vector<double>& xs,
                        const std::vector<double>& direct, const std::vector<double>& factored) {
  std::ostringstream out;
  out << "x,lyapunov_ln_direct,lyapunov_ln_factored\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << format_sig17(xs[i]) << ',' << format_sig17(direct[i]) << ','
        << format_sig17(factored[i]) << '\n';
  write_text_file(path, out.str());
}

namespace {

constexpr int kWidth = 960;
constexpr int kHeight = 600;
constexpr int kMargin = 70;

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Canvas {
  double x_min, x_max, y_min, y_max;
  double px(double x) const {
    return kMargin + (x - x_min) / (x_max - x_min) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - (y - y_min) / (y_max - y_min) * (kHeight - 2 * kMargin);
  }
};

void svg_header(std::ostringstream& out, const Canvas& c, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"18\" "
      << "font-family=\"sans-serif\">" << title << "</text>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = c.x_min + (c.x_max - c.x_min) * i / 4.0;
    const double fy = c.y_min + (c.y_max - c.y_min) * i / 4.0;
    out << "<text x=\"" << c.px(fx) << "\" y=\"" << kHeight - kMargin + 22
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << svg_num(fx) << "</text>\n";
    out << "<text x=\"" << kMargin - 8 << "\" y=\"" << c.py(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << svg_num(fy)
        << "</text>\n";
  }
}

Canvas fit_canvas(const std::vector<double>& xs, const std::vector<double>& ys) {
  Canvas c{};
  c.x_min = *std::min_element(xs.begin(), xs.end());
  c.x_max = *std::max_element(xs.begin(), xs.end());
  c.y_min = *std::min_element(ys.begin(), ys.end());
  c.y_max = *std::max_element(ys.begin(), ys.end());
  if (c.x_max == c.x_min) c.x_max = c.x_min + 1.0;
  if (c.y_max == c.y_min) c.y_max = c.y_min + 1.0;
  const double pad = 0.03 * (c.y_max - c.y_min);
  c.y_min -= pad;
  c.y_max += pad;
  return c;
}

}  // namespace

void write_svg_line(const std::string& path, const std::vector<double>& xs,
                    const std::vector<double>& ys, const std::string& title) {
  if (xs.empty() || xs.size() != ys.size())
    throw ConfigError("svg line plot needs matching non-empty series");
  const Canvas c = fit_canvas(xs, ys);
  std::ostringstream out;
  svg_header(out, c, title);
  out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.2\" points=\"";
  // Cap the emitted points; beyond a few thousand the polyline is subpixel.
  const std::size_t stride = std::max<std::size_t>(1, xs.size() / 4000);
  for (std::size_t i = 0; i < xs.size(); i += stride)
    out << svg_num(c.px(xs[i])) << ',' << svg_num(c.py(ys[i])) << ' ';
  out << svg_num(c.px(xs.back())) << ',' << svg_num(c.py(ys.back()));
  out << "\"/>\n</svg>\n";
  write_text_file(path, out.str());
}

void write_svg_histogram(const std::string& path, const Histogram& h, const std::string& title) {
  if (h.masses.empty()) throw ConfigError("svg histogram needs at least one bin");
  std::vector<double> xs{h.edges.front(), h.edges.back()};
  std::vector<double> ys{0.0, *std::max_element(h.masses.begin(), h.masses.end())};
  const Canvas c = fit_canvas(xs, ys);
  std::ostringstream out;
  svg_header(out, c, title);
  for (std::size_t i = 0; i < h.masses.size(); ++i) {
    const double x0 = c.px(h.edges[i]);
    const double x1 = c.px(h.edges[i + 1]);
    const double y0 = c.py(h.masses[i]);
    const double y1 = c.py(0.0);
    out << "<rect x=\"" << svg_num(x0) << "\" y=\"" << svg_num(y0) << "\" width=\""
        << svg_num(std::max(0.5, x1 - x0)) << "\" height=\"" << svg_num(std::max(0.0, y1 - y0))
        << "\" fill=\"#5b9bd5\" stroke=\"white\" stroke-width=\"0.4\"/>\n";
  }
  out << "</svg>\n";
  write_text_file(path, out.str());
}

}  // namespace stosis
