#include "cglstab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <variant>

#include "cglstab/csvio.hpp"

namespace cglstab {

Plant ExperimentConfig::effective_plant() const {
  if (plant == "linear") return Plant::linear;
  if (plant == "nonlinear") return Plant::nonlinear;
  // "uncontrolled" keeps whatever dynamics the parameters describe
  return params.kappa > 0.0 ? Plant::nonlinear : Plant::linear;
}

ExperimentConfig default_config(const std::string& preset) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  if (preset == "exp1") {
    cfg.params = experiment1_params();
    cfg.plant = "linear";
    cfg.rate_mode = "minimal";
    cfg.n_x = 201;
    cfg.n_t = 2001;
    cfg.t_max = 1.0;
    cfg.crosscheck.xs = {0.2, 0.35, 0.5, 0.65, 0.8};
    cfg.crosscheck.ts = {0.005, 0.01, 0.015, 0.02};
    cfg.crosscheck.tolerance = 0.01;
  } else if (preset == "exp2") {
    cfg.params = experiment2_params();
    cfg.plant = "nonlinear";
    cfg.rate_mode = "rapid";
    cfg.n_x = 201;
    cfg.n_t = 6001;
    cfg.t_max = 3.0;
  } else if (preset != "custom") {
    throw ConfigError("unknown preset '" + preset + "' (expected exp1, exp2 or custom)");
  }
  return cfg;
}

namespace {

using Value = std::variant<std::string, bool, double, std::vector<double>>;

struct Entry {
  std::string section, key;
  Value value;
  int line = 0;
};

[[noreturn]] void bad(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// strip a trailing comment, respecting double-quoted strings
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

double parse_number(const std::string& s, int line) {
  const std::string t = trim(s);
  if (t.empty()) bad(line, "empty numeric value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) bad(line, "malformed number '" + t + "'");
  return v;
}

Value parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) bad(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') bad(line, "unterminated string");
    return s.substr(1, s.size() - 2);
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') bad(line, "unterminated array");
    std::vector<double> out;
    const std::string body = s.substr(1, s.size() - 2);
    std::string item;
    std::istringstream is(body);
    while (std::getline(is, item, ',')) {
      const std::string it = trim(item);
      if (it.empty() && out.empty() && is.eof()) break; // empty array
      out.push_back(parse_number(it, line));
    }
    return out;
  }
  return parse_number(s, line);
}

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> entries;
  std::string section;
  std::istringstream is(text);
  std::string line;
  int ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') bad(ln, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) bad(ln, "empty section name");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) bad(ln, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) bad(ln, "empty key");
    if (section.empty()) bad(ln, "key '" + key + "' outside any section");
    entries.push_back({section, key, parse_value(s.substr(eq + 1), ln), ln});
  }
  return entries;
}

const std::string& as_string(const Entry& e) {
  if (!std::holds_alternative<std::string>(e.value))
    bad(e.line, "key '" + e.key + "' expects a string");
  return std::get<std::string>(e.value);
}
bool as_bool(const Entry& e) {
  if (!std::holds_alternative<bool>(e.value)) bad(e.line, "key '" + e.key + "' expects a boolean");
  return std::get<bool>(e.value);
}
double as_number(const Entry& e) {
  if (!std::holds_alternative<double>(e.value))
    bad(e.line, "key '" + e.key + "' expects a number");
  return std::get<double>(e.value);
}
int as_int(const Entry& e) {
  const double v = as_number(e);
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) bad(e.line, "key '" + e.key + "' expects an integer");
  return static_cast<int>(r);
}
const std::vector<double>& as_array(const Entry& e) {
  if (!std::holds_alternative<std::vector<double>>(e.value))
    bad(e.line, "key '" + e.key + "' expects an array");
  return std::get<std::vector<double>>(e.value);
}

void apply_entry(ExperimentConfig& cfg, const Entry& e) {
  const std::string id = e.section + "." + e.key;
  if (id == "experiment.preset") return; // already applied
  if (id == "experiment.plant") cfg.plant = as_string(e);
  else if (id == "experiment.control") cfg.control = as_bool(e);
  else if (id == "experiment.rate_mode") cfg.rate_mode = as_string(e);
  else if (id == "experiment.seed") {
    const double v = as_number(e);
    if (v < 0 || v != std::floor(v)) bad(e.line, "seed expects a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(v);
  } else if (id == "params.nu") cfg.params.nu = as_number(e);
  else if (id == "params.alpha") cfg.params.alpha = as_number(e);
  else if (id == "params.gamma") cfg.params.gamma = as_number(e);
  else if (id == "params.L") cfg.params.L = as_number(e);
  else if (id == "params.kappa") cfg.params.kappa = as_number(e);
  else if (id == "params.beta") cfg.params.beta = as_number(e);
  else if (id == "params.p") cfg.params.p = as_number(e);
  else if (id == "params.mu") cfg.params.mu = as_number(e);
  else if (id == "params.n_modes") cfg.params.n_modes = as_int(e);
  else if (id == "grid.n_x") cfg.n_x = as_int(e);
  else if (id == "grid.n_t") cfg.n_t = as_int(e);
  else if (id == "grid.t_max") cfg.t_max = as_number(e);
  else if (id == "initial.kind") cfg.initial.kind = as_string(e);
  else if (id == "initial.sine_k") cfg.initial.sine_k = as_int(e);
  else if (id == "initial.re") cfg.initial.re = as_array(e);
  else if (id == "initial.im") cfg.initial.im = as_array(e);
  else if (id == "transform.weighted_projection") cfg.weighted_projection = as_bool(e);
  else if (id == "fit.t0") cfg.fit_t0 = as_number(e);
  else if (id == "fit.t1") cfg.fit_t1 = as_number(e);
  else if (id == "output.dir") cfg.out_dir = as_string(e);
  else if (id == "crosscheck.xs") cfg.crosscheck.xs = as_array(e);
  else if (id == "crosscheck.ts") cfg.crosscheck.ts = as_array(e);
  else if (id == "crosscheck.tolerance") cfg.crosscheck.tolerance = as_number(e);
  else if (id == "crosscheck.r_max") cfg.crosscheck.r_max = as_number(e);
  else if (id == "crosscheck.n_quad") cfg.crosscheck.n_quad = as_int(e);
  else if (id == "admissibility.mu_values") cfg.admissibility.mu_values = as_array(e);
  else if (id == "admissibility.n_values") cfg.admissibility.n_values = as_array(e);
  else bad(e.line, "unknown key '" + id + "'");
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
  const std::vector<Entry> entries = tokenize(text);
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      if (entries[i].section == entries[j].section && entries[i].key == entries[j].key)
        bad(entries[j].line, "duplicate key '" + entries[j].section + "." + entries[j].key + "'");

  std::string preset = "custom";
  for (const Entry& e : entries)
    if (e.section == "experiment" && e.key == "preset") preset = as_string(e);

  ExperimentConfig cfg = default_config(preset);
  for (const Entry& e : entries) apply_entry(cfg, e);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.preset != "exp1" && cfg.preset != "exp2" && cfg.preset != "custom")
    throw ConfigError("unknown preset '" + cfg.preset + "'");
  if (cfg.plant != "linear" && cfg.plant != "nonlinear" && cfg.plant != "uncontrolled")
    throw ConfigError("unknown plant '" + cfg.plant + "'");
  if (cfg.rate_mode != "minimal" && cfg.rate_mode != "rapid")
    throw ConfigError("unknown rate_mode '" + cfg.rate_mode + "'");
  if (cfg.initial.kind != "preset" && cfg.initial.kind != "sine" && cfg.initial.kind != "modes")
    throw ConfigError("unknown initial kind '" + cfg.initial.kind + "'");
  if (cfg.initial.kind == "preset" && cfg.preset == "custom")
    throw ConfigError("initial kind 'preset' needs an experiment preset");
  if (cfg.initial.kind == "modes") {
    if (cfg.initial.re.empty()) throw ConfigError("initial kind 'modes' needs coefficients in re");
    if (!cfg.initial.im.empty() && cfg.initial.im.size() != cfg.initial.re.size())
      throw ConfigError("initial im length must match re");
  }
  if (cfg.initial.kind == "sine" && cfg.initial.sine_k < 1)
    throw ConfigError("initial sine_k must be >= 1");
  if (cfg.plant == "nonlinear" && cfg.params.kappa == 0.0)
    throw ConfigError("nonlinear plant needs kappa > 0");
  if (cfg.n_x < 3) throw ConfigError("n_x must be >= 3");
  if (cfg.n_t < 2) throw ConfigError("n_t must be >= 2");
  if (!(cfg.t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (cfg.fit_t0 >= 0.0 && cfg.fit_t1 >= 0.0 && !(cfg.fit_t0 < cfg.fit_t1))
    throw ConfigError("fit window needs t0 < t1");
  cfg.params.validate();
}

namespace {
std::string fmt_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt_g17(v[i]);
  }
  return s + "]";
}
} // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[experiment]\n"
     << "preset = \"" << cfg.preset << "\"\n"
     << "plant = \"" << cfg.plant << "\"\n"
     << "control = " << (cfg.control ? "true" : "false") << "\n"
     << "rate_mode = \"" << cfg.rate_mode << "\"\n"
     << "seed = " << cfg.seed << "\n\n"
     << "[params]\n"
     << "nu = " << fmt_g17(cfg.params.nu) << "\n"
     << "alpha = " << fmt_g17(cfg.params.alpha) << "\n"
     << "gamma = " << fmt_g17(cfg.params.gamma) << "\n"
     << "L = " << fmt_g17(cfg.params.L) << "\n"
     << "kappa = " << fmt_g17(cfg.params.kappa) << "\n"
     << "beta = " << fmt_g17(cfg.params.beta) << "\n"
     << "p = " << fmt_g17(cfg.params.p) << "\n"
     << "mu = " << fmt_g17(cfg.params.mu) << "\n"
     << "n_modes = " << cfg.params.n_modes << "\n\n"
     << "[grid]\n"
     << "n_x = " << cfg.n_x << "\n"
     << "n_t = " << cfg.n_t << "\n"
     << "t_max = " << fmt_g17(cfg.t_max) << "\n\n"
     << "[initial]\n"
     << "kind = \"" << cfg.initial.kind << "\"\n"
     << "sine_k = " << cfg.initial.sine_k << "\n"
     << "re = " << fmt_array(cfg.initial.re) << "\n"
     << "im = " << fmt_array(cfg.initial.im) << "\n\n"
     << "[transform]\n"
     << "weighted_projection = " << (cfg.weighted_projection ? "true" : "false") << "\n\n"
     << "[fit]\n"
     << "t0 = " << fmt_g17(cfg.fit_t0) << "\n"
     << "t1 = " << fmt_g17(cfg.fit_t1) << "\n\n"
     << "[output]\n"
     << "dir = \"" << cfg.out_dir << "\"\n\n"
     << "[crosscheck]\n"
     << "xs = " << fmt_array(cfg.crosscheck.xs) << "\n"
     << "ts = " << fmt_array(cfg.crosscheck.ts) << "\n"
     << "tolerance = " << fmt_g17(cfg.crosscheck.tolerance) << "\n"
     << "r_max = " << fmt_g17(cfg.crosscheck.r_max) << "\n"
     << "n_quad = " << cfg.crosscheck.n_quad << "\n\n"
     << "[admissibility]\n"
     << "mu_values = " << fmt_array(cfg.admissibility.mu_values) << "\n"
     << "n_values = " << fmt_array(cfg.admissibility.n_values) << "\n";
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // where the results land does not change what they are
  ExperimentConfig c = cfg;
  c.out_dir.clear();
  return fnv1a64(serialize_config(c));
}

ComplexField build_initial_state(const ExperimentConfig& cfg, const Grid& g) {
  const double pi = std::acos(-1.0);
  ComplexField u0 = ComplexField::Zero(g.n);
  if (cfg.initial.kind == "preset") {
    if (cfg.preset == "exp1") {
      for (int i = 0; i < g.n; ++i)
        u0(i) = std::sin(2.0 * pi * g.x(i)) - 0.5 * std::sin(3.0 * pi * g.x(i));
    } else if (cfg.preset == "exp2") {
      for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        u0(i) = Complex{2.0 * x - 1.0 - std::cos(pi * x), -2.0 * std::sin(2.0 * pi * x)};
      }
    } else {
      throw ConfigError("initial kind 'preset' needs an experiment preset");
    }
  } else if (cfg.initial.kind == "sine") {
    for (int i = 0; i < g.n; ++i)
      u0(i) = std::sin(cfg.initial.sine_k * pi * g.x(i) / g.L);
  } else if (cfg.initial.kind == "modes") {
    const double amp = std::sqrt(2.0 / g.L);
    for (std::size_t j = 0; j < cfg.initial.re.size(); ++j) {
      const double im = j < cfg.initial.im.size() ? cfg.initial.im[j] : 0.0;
      const Complex c{cfg.initial.re[j], im};
      const double kj = (2.0 * (j + 1) - 1.0) * pi / (2.0 * g.L);
      for (int i = 0; i < g.n; ++i) u0(i) += c * (amp * std::sin(kj * g.x(i)));
    }
  } else {
    throw ConfigError("unknown initial kind '" + cfg.initial.kind + "'");
  }
  return u0;
}

} // namespace cglstab
