#include "stosis/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "stosis/errors.hpp"

namespace stosis {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

struct Section {
  std::string name;
  std::map<std::string, std::string> values;
  std::set<std::string> consumed;
};

// Raw parse: sections of key = value lines; '#' and ';' start comment lines.
std::vector<Section> tokenize(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  Section* current = nullptr;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
      for (const Section& s : sections)
        if (s.name == name)
          throw ConfigError("duplicate section [" + name + "]");
      sections.push_back(Section{name, {}, {}});
      current = &sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    if (!current)
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (current->values.count(key))
      throw ConfigError("duplicate key '" + key + "' in section [" + current->name + "]");
    current->values[key] = value;
  }
  return sections;
}

class SectionReader {
 public:
  explicit SectionReader(Section* s) : s_(s) {}

  bool present() const { return s_ != nullptr; }
  const std::string& name() const { return s_->name; }

  std::optional<std::string> raw(const std::string& key) {
    if (!s_) return std::nullopt;
    auto it = s_->values.find(key);
    if (it == s_->values.end()) return std::nullopt;
    s_->consumed.insert(key);
    return it->second;
  }

  double require_real(const std::string& key) {
    auto v = raw(key);
    if (!v)
      throw ConfigError("section [" + s_->name + "]: missing required key '" + key + "'");
    return to_real(key, *v);
  }

  double real_or(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? to_real(key, *v) : fallback;
  }

  std::int64_t int_or(const std::string& key, std::int64_t fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    const long long parsed = std::strtoll(v->c_str(), &end, 10);
    if (errno != 0 || end == v->c_str() || *end != '\0')
      throw ConfigError("key '" + key + "' in [" + s_->name + "]: expected an integer, got '" +
                        *v + "'");
    return parsed;
  }

  std::uint64_t uint_or(const std::string& key, std::uint64_t fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v->c_str(), &end, 10);
    if (errno != 0 || end == v->c_str() || *end != '\0' || v->front() == '-')
      throw ConfigError("key '" + key + "' in [" + s_->name +
                        "]: expected an unsigned integer, got '" + *v + "'");
    return parsed;
  }

  bool bool_or(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ConfigError("key '" + key + "' in [" + s_->name + "]: expected true or false, got '" +
                      *v + "'");
  }

  std::string string_or(const std::string& key, const std::string& fallback) {
    auto v = raw(key);
    return v ? *v : fallback;
  }

  void finish() const {
    if (!s_) return;
    for (const auto& [key, value] : s_->values)
      if (!s_->consumed.count(key))
        throw ConfigError("unknown key '" + key + "' in section [" + s_->name + "]");
  }

 private:
  double to_real(const std::string& key, const std::string& v) const {
    errno = 0;
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (errno != 0 || end == v.c_str() || *end != '\0' || !std::isfinite(parsed))
      throw ConfigError("key '" + key + "' in [" + s_->name +
                        "]: expected a finite real number, got '" + v + "'");
    return parsed;
  }

  Section* s_;
};

Section* find_section(std::vector<Section>& sections, const std::string& name) {
  for (Section& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

void read_sim_keys(SectionReader& r, SimConfig& sim, bool stochastic_default) {
  sim.x0 = r.require_real("x0");
  sim.t_end = r.require_real("t_end");
  sim.dt = r.real_or("dt", 0.05);
  sim.seed = r.uint_or("seed", 0);
  sim.clamp_eps = r.real_or("clamp_eps", 1e-12);
  sim.record_every = r.int_or("record_every", 1);
  const std::string scheme_name =
      r.string_or("scheme", stochastic_default ? "euler_maruyama" : "rk4");
  const auto scheme = scheme_from_string(scheme_name);
  if (!scheme)
    throw ConfigError("key 'scheme' in [" + r.name() +
                      "]: expected rk4 | euler_maruyama | milstein, got '" + scheme_name + "'");
  sim.scheme = *scheme;
}

void read_ensemble_keys(SectionReader& r, ExperimentConfig& exp) {
  read_sim_keys(r, exp.sim, true);
  exp.n_trajectories = static_cast<int>(r.int_or("n_trajectories", 100));
  exp.burn_in = r.real_or("burn_in", 0.1 * exp.sim.t_end);
  exp.histogram_bins = static_cast<int>(r.int_or("histogram_bins", 100));
  exp.extinction_threshold = r.real_or("extinction_threshold", 1e-6);
  if (auto v = r.raw("crossing_level")) exp.crossing_level = r.real_or("crossing_level", 0.0);
  if (auto a = r.raw("hitting_a")) exp.hitting_a = r.real_or("hitting_a", 0.0);
  if (auto b = r.raw("hitting_b")) exp.hitting_b = r.real_or("hitting_b", 0.0);
  if (exp.hitting_a.has_value() != exp.hitting_b.has_value())
    throw ConfigError("section [" + r.name() + "]: hitting_a and hitting_b must come together");
  exp.write_trajectories = r.bool_or("write_trajectories", false);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

IncidenceFunction IncidenceConfig::make() const {
  if (family == "h1") return make_h1(kappa, alpha);
  if (family == "h2") return make_h2(kappa, alpha);
  throw ConfigError("incidence family must be h1 or h2, got '" + family + "'");
}

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::classify: return "classify";
    case ExperimentKind::xi: return "xi";
    case ExperimentKind::lyapunov: return "lyapunov";
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::ensemble: return "ensemble";
    case ExperimentKind::stationary: return "stationary";
  }
  return "classify";
}

std::optional<ExperimentKind> experiment_from_string(std::string_view name) {
  if (name == "classify") return ExperimentKind::classify;
  if (name == "xi") return ExperimentKind::xi;
  if (name == "lyapunov") return ExperimentKind::lyapunov;
  if (name == "simulate") return ExperimentKind::simulate;
  if (name == "ensemble") return ExperimentKind::ensemble;
  if (name == "stationary") return ExperimentKind::stationary;
  return std::nullopt;
}

EnsembleConfig RunConfig::make_ensemble() const {
  EnsembleConfig e;
  e.base = experiment.sim;
  e.n_trajectories = experiment.n_trajectories;
  e.master_seed = experiment.sim.seed;
  e.burn_in = experiment.burn_in;
  e.histogram_bins = experiment.histogram_bins;
  e.extinction_threshold = experiment.extinction_threshold;
  e.crossing_level = experiment.crossing_level;
  if (experiment.hitting_a && experiment.hitting_b)
    e.hitting_interval = std::make_pair(*experiment.hitting_a, *experiment.hitting_b);
  e.workers = workers;
  return e;
}

RunConfig parse_config(const std::string& text) {
  std::vector<Section> sections = tokenize(text);

  static const std::set<std::string> known = {"model",    "incidence", "output",  "classify",
                                              "xi",       "lyapunov",  "simulate", "ensemble",
                                              "stationary"};
  static const std::set<std::string> experiments = {"classify", "xi",       "lyapunov",
                                                    "simulate", "ensemble", "stationary"};

  std::vector<std::string> found_experiments;
  for (const Section& s : sections) {
    if (!known.count(s.name)) throw ConfigError("unknown section [" + s.name + "]");
    if (experiments.count(s.name)) found_experiments.push_back(s.name);
  }
  if (found_experiments.empty())
    throw ConfigError("config must contain exactly one experiment section "
                      "(classify | xi | lyapunov | simulate | ensemble | stationary); none found");
  if (found_experiments.size() > 1)
    throw ConfigError("config must contain exactly one experiment section; found [" +
                      found_experiments[0] + "] and [" + found_experiments[1] + "]");

  RunConfig cfg;

  Section* model_section = find_section(sections, "model");
  if (!model_section) throw ConfigError("missing required section [model]");
  {
    SectionReader r(model_section);
    cfg.model.beta = r.require_real("beta");
    cfg.model.gamma = r.require_real("gamma");
    cfg.model.mu = r.require_real("mu");
    cfg.model.sigma = r.require_real("sigma");
    cfg.model.N = r.require_real("N");
    r.finish();
  }
  cfg.model.validate();

  {
    SectionReader r(find_section(sections, "incidence"));
    if (r.present()) {
      cfg.incidence.family = r.string_or("family", "h1");
      if (cfg.incidence.family != "h1" && cfg.incidence.family != "h2")
        throw ConfigError("key 'family' in [incidence]: expected h1 or h2, got '" +
                          cfg.incidence.family + "'");
      cfg.incidence.kappa = r.real_or("kappa", 1.0);
      cfg.incidence.alpha = r.real_or("alpha", cfg.incidence.family == "h1" ? 0.01 : 1e-4);
      r.finish();
    } else {
      cfg.incidence.alpha = 0.01;  // h1 default
    }
  }
  cfg.make_incidence();  // surfaces invalid kappa/alpha as early errors

  {
    SectionReader r(find_section(sections, "output"));
    if (r.present()) {
      cfg.output.directory = r.string_or("directory", "out");
      const std::string format = r.string_or("format", "both");
      if (format == "csv") {
        cfg.output.csv = true;
        cfg.output.json = false;
      } else if (format == "json") {
        cfg.output.csv = false;
        cfg.output.json = true;
      } else if (format == "both") {
        cfg.output.csv = cfg.output.json = true;
      } else {
        throw ConfigError("key 'format' in [output]: expected csv | json | both, got '" + format +
                          "'");
      }
      cfg.output.svg = r.bool_or("svg", false);
      r.finish();
    }
  }

  const std::string exp_name = found_experiments.front();
  cfg.experiment.kind = *experiment_from_string(exp_name);
  SectionReader r(find_section(sections, exp_name));
  switch (cfg.experiment.kind) {
    case ExperimentKind::classify:
    case ExperimentKind::xi:
      break;  // no sub-fields
    case ExperimentKind::lyapunov:
      cfg.experiment.grid_points = static_cast<int>(r.int_or("grid_points", 1000));
      if (cfg.experiment.grid_points < 10)
        throw ConfigError("key 'grid_points' in [lyapunov]: must be >= 10");
      break;
    case ExperimentKind::simulate:
      read_sim_keys(r, cfg.experiment.sim, true);
      break;
    case ExperimentKind::ensemble:
    case ExperimentKind::stationary:
      read_ensemble_keys(r, cfg.experiment);
      break;
  }
  r.finish();

  // Numeric invariants checked against the model before any computation.
  if (cfg.experiment.kind == ExperimentKind::simulate) {
    cfg.experiment.sim.validate(cfg.model);
  } else if (cfg.experiment.kind == ExperimentKind::ensemble ||
             cfg.experiment.kind == ExperimentKind::stationary) {
    cfg.make_ensemble().validate(cfg.model);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string RunConfig::to_ini() const {
  std::ostringstream out;
  out << "[model]\n";
  out << "beta = " << format_real(model.beta) << "\n";
  out << "gamma = " << format_real(model.gamma) << "\n";
  out << "mu = " << format_real(model.mu) << "\n";
  out << "sigma = " << format_real(model.sigma) << "\n";
  out << "N = " << format_real(model.N) << "\n";
  out << "\n[incidence]\n";
  out << "family = " << incidence.family << "\n";
  out << "kappa = " << format_real(incidence.kappa) << "\n";
  out << "alpha = " << format_real(incidence.alpha) << "\n";
  out << "\n[" << to_string(experiment.kind) << "]\n";
  switch (experiment.kind) {
    case ExperimentKind::classify:
    case ExperimentKind::xi:
      break;
    case ExperimentKind::lyapunov:
      out << "grid_points = " << experiment.grid_points << "\n";
      break;
    case ExperimentKind::simulate:
    case ExperimentKind::ensemble:
    case ExperimentKind::stationary: {
      out << "x0 = " << format_real(experiment.sim.x0) << "\n";
      out << "t_end = " << format_real(experiment.sim.t_end) << "\n";
      out << "dt = " << format_real(experiment.sim.dt) << "\n";
      out << "scheme = " << to_string(experiment.sim.scheme) << "\n";
      out << "seed = " << experiment.sim.seed << "\n";
      out << "clamp_eps = " << format_real(experiment.sim.clamp_eps) << "\n";
      out << "record_every = " << experiment.sim.record_every << "\n";
      if (experiment.kind != ExperimentKind::simulate) {
        out << "n_trajectories = " << experiment.n_trajectories << "\n";
        out << "burn_in = " << format_real(experiment.burn_in) << "\n";
        out << "histogram_bins = " << experiment.histogram_bins << "\n";
        out << "extinction_threshold = " << format_real(experiment.extinction_threshold) << "\n";
        if (experiment.crossing_level)
          out << "crossing_level = " << format_real(*experiment.crossing_level) << "\n";
        if (experiment.hitting_a && experiment.hitting_b) {
          out << "hitting_a = " << format_real(*experiment.hitting_a) << "\n";
          out << "hitting_b = " << format_real(*experiment.hitting_b) << "\n";
        }
        out << "write_trajectories = " << (experiment.write_trajectories ? "true" : "false")
            << "\n";
      }
      break;
    }
  }
  out << "\n[output]\n";
  out << "directory = " << output.directory << "\n";
  out << "format = " << (output.csv && output.json ? "both" : (output.csv ? "csv" : "json"))
      << "\n";
  out << "svg = " << (output.svg ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace stosis
