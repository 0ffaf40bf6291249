#include "fkpp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fkpp/spaces.hpp"

namespace fkpp::config {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  std::ostringstream msg;
  msg << "key \"" << key << "\": value \"" << value << "\" is not "
      << expected;
  throw InvalidArgument(msg.str());
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    bad_value(key, value, "a number");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    bad_value(key, value, "an integer");
  }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  long long v = parse_int(key, value);
  if (v < 0) bad_value(key, value, "a nonnegative integer");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = lower(value);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, value, "a boolean");
}

}  // namespace

void set_key(RunConfig& cfg, const std::string& dotted_key,
             const std::string& value) {
  const std::string key = lower(dotted_key);
  if (key == "grid.dim")
    cfg.grid.dim = static_cast<int>(parse_int(key, value));
  else if (key == "grid.n")
    cfg.grid.n = parse_size(key, value);
  else if (key == "grid.half_width")
    cfg.grid.half_width = parse_double(key, value);
  else if (key == "operator.s")
    cfg.op.s = parse_double(key, value);
  else if (key == "operator.local")
    cfg.op.local = parse_bool(key, value);
  else if (key == "operator.fractional")
    cfg.op.fractional = parse_bool(key, value);
  else if (key == "reaction.form")
    cfg.reaction.form = lower(trim(value));
  else if (key == "reaction.rate")
    cfg.reaction.rate = parse_double(key, value);
  else if (key == "reaction.exponent")
    cfg.reaction.exponent = parse_double(key, value);
  else if (key == "solver.scheme")
    cfg.solver.scheme = lower(trim(value));
  else if (key == "solver.dt")
    cfg.solver.dt = parse_double(key, value);
  else if (key == "solver.t_end")
    cfg.solver.t_end = parse_double(key, value);
  else if (key == "solver.picard_tol")
    cfg.solver.picard_tol = parse_double(key, value);
  else if (key == "solver.picard_max_iters")
    cfg.solver.picard_max_iters = parse_size(key, value);
  else if (key == "solver.boundary_guard")
    cfg.solver.boundary_guard = parse_double(key, value);
  else if (key == "solver.snapshot_stride")
    cfg.solver.snapshot_stride = parse_size(key, value);
  else if (key == "experiment.regime")
    cfg.experiment.regime = lower(trim(value));
  else if (key == "experiment.lambda")
    cfg.experiment.lambda = parse_double(key, value);
  else if (key == "experiment.fit_t_lo")
    cfg.experiment.fit_t_lo = parse_double(key, value);
  else if (key == "experiment.fit_t_hi")
    cfg.experiment.fit_t_hi = parse_double(key, value);
  else if (key == "experiment.gamma")
    cfg.experiment.gamma = parse_double(key, value);
  else if (key == "experiment.u0_amplitude")
    cfg.experiment.u0_amplitude = parse_double(key, value);
  else if (key == "experiment.u0_width")
    cfg.experiment.u0_width = parse_double(key, value);
  else if (key == "experiment.seed")
    cfg.experiment.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "experiment.quality")
    cfg.experiment.quality = static_cast<int>(parse_int(key, value));
  else {
    std::ostringstream msg;
    msg << "unknown key \"" << dotted_key << "\"";
    throw InvalidArgument(msg.str());
  }
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg = default_config();
  static const char* kSections[] = {"grid", "operator", "reaction", "solver",
                                    "experiment"};
  std::istringstream in(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        std::ostringstream msg;
        msg << "line " << line_no << ": malformed section header \"" << line
            << "\"";
        throw InvalidArgument(msg.str());
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (std::find_if(std::begin(kSections), std::end(kSections),
                       [&](const char* s) { return section == s; }) ==
          std::end(kSections)) {
        std::ostringstream msg;
        msg << "unknown section [" << section << "]";
        throw InvalidArgument(msg.str());
      }
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected key = value, got \"" << line
          << "\"";
      throw InvalidArgument(msg.str());
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": key \"" << key
          << "\" appears before any section header";
      throw InvalidArgument(msg.str());
    }
    set_key(cfg, section + "." + key, value);
  }
  return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
  for (const auto& [key, value] : flatten(cfg)) {
    std::string env_name = "FKPP_";
    for (char c : key)
      env_name.push_back(c == '.' ? '_'
                                  : static_cast<char>(std::toupper(
                                        static_cast<unsigned char>(c))));
    if (const char* env = std::getenv(env_name.c_str()))
      set_key(cfg, key, env);
    (void)value;
  }
}

void resolve(RunConfig& cfg) {
  if (cfg.experiment.fit_t_lo < 0.0)
    cfg.experiment.fit_t_lo = cfg.solver.t_end / 2.0;
  if (cfg.experiment.fit_t_hi < 0.0) cfg.experiment.fit_t_hi = cfg.solver.t_end;
}

UniformGrid RunConfig::make_grid() const {
  return fkpp::make_grid(grid.dim, grid.n, grid.half_width);
}

SymbolSpec RunConfig::make_operator() const {
  return make_symbol(op.s, op.local, op.fractional);
}

dynamics::ReactionKPP RunConfig::make_reaction() const {
  dynamics::ReactionForm form;
  if (reaction.form == "logistic")
    form = dynamics::ReactionForm::logistic;
  else if (reaction.form == "concave_power")
    form = dynamics::ReactionForm::concave_power;
  else {
    std::ostringstream msg;
    msg << "key \"reaction.form\": \"" << reaction.form
        << "\" is not one of {logistic, concave_power}";
    throw InvalidArgument(msg.str());
  }
  return dynamics::ReactionKPP(form, reaction.rate, reaction.exponent);
}

dynamics::SolverConfig RunConfig::make_solver() const {
  dynamics::SolverConfig cfg;
  if (solver.scheme == "exponential_euler")
    cfg.scheme = dynamics::Scheme::exponential_euler;
  else if (solver.scheme == "picard" || solver.scheme == "picard_duhamel")
    cfg.scheme = dynamics::Scheme::picard_duhamel;
  else {
    std::ostringstream msg;
    msg << "key \"solver.scheme\": \"" << solver.scheme
        << "\" is not one of {exponential_euler, picard}";
    throw InvalidArgument(msg.str());
  }
  cfg.dt = solver.dt;
  cfg.t_end = solver.t_end;
  cfg.picard_tol = solver.picard_tol;
  cfg.picard_max_iters = solver.picard_max_iters;
  cfg.boundary_guard = solver.boundary_guard;
  cfg.snapshot_stride = solver.snapshot_stride;
  return cfg;
}

void validate(const RunConfig& cfg) {
  auto fail = [](const char* key, const std::string& what) {
    std::ostringstream msg;
    msg << "key \"" << key << "\": " << what;
    throw InvalidArgument(msg.str());
  };
  if (cfg.grid.dim != 1 && cfg.grid.dim != 2)
    fail("grid.dim", "must be 1 or 2");
  if (cfg.grid.n < 8 || (cfg.grid.n & (cfg.grid.n - 1)) != 0)
    fail("grid.n", "must be a power of two >= 8, got " +
                       std::to_string(cfg.grid.n));
  if (!(cfg.grid.half_width > 0.0))
    fail("grid.half_width", "must be positive");
  if (!(cfg.op.s > 0.0 && cfg.op.s < 1.0))
    fail("operator.s", "must lie in (0, 1)");
  if (!cfg.op.local && !cfg.op.fractional)
    fail("operator.local", "at least one operator part must be enabled");
  cfg.make_grid();
  cfg.make_operator();
  dynamics::ReactionKPP f = cfg.make_reaction();
  dynamics::validate_solver(cfg.make_solver(), f);
  if (cfg.experiment.gamma != 0.0) {
    // Constructing the weighted norm enforces gamma < 2s with its own
    // message; the fractional exponent bounds the admissible growth even
    // when the local part is present.
    spaces::make_weighted_norm(cfg.experiment.gamma, cfg.op.s);
  }
  if (!(cfg.experiment.lambda > 0.0 && cfg.experiment.lambda < 1.0))
    throw InvalidArgument("key \"experiment.lambda\": must lie in (0, 1)");
  if (!(cfg.experiment.fit_t_lo < cfg.experiment.fit_t_hi))
    throw InvalidArgument(
        "key \"experiment.fit_t_lo\": fit window is degenerate");
  if (cfg.experiment.quality < 1 || cfg.experiment.quality > 3)
    throw InvalidArgument("key \"experiment.quality\": must be 1, 2, or 3");
  static const char* kRegimes[] = {"classical", "fractional", "mixed", "all"};
  if (std::find_if(std::begin(kRegimes), std::end(kRegimes),
                   [&](const char* r) { return cfg.experiment.regime == r; }) ==
      std::end(kRegimes)) {
    std::ostringstream msg;
    msg << "key \"experiment.regime\": \"" << cfg.experiment.regime
        << "\" is not one of {classical, fractional, mixed, all}";
    throw InvalidArgument(msg.str());
  }
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::ostringstream msg;
    msg << "cannot open config file \"" << path << "\"";
    throw InvalidArgument(msg.str());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = parse_config_text(buf.str());
  apply_env_overrides(cfg);
  resolve(cfg);
  validate(cfg);
  return cfg;
}

std::vector<std::pair<std::string, std::string>> flatten(
    const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](const char* key, std::string value) {
    out.emplace_back(key, std::move(value));
  };
  add("grid.dim", std::to_string(cfg.grid.dim));
  add("grid.n", std::to_string(cfg.grid.n));
  add("grid.half_width", format_g17(cfg.grid.half_width));
  add("operator.s", format_g17(cfg.op.s));
  add("operator.local", cfg.op.local ? "true" : "false");
  add("operator.fractional", cfg.op.fractional ? "true" : "false");
  add("reaction.form", cfg.reaction.form);
  add("reaction.rate", format_g17(cfg.reaction.rate));
  add("reaction.exponent", format_g17(cfg.reaction.exponent));
  add("solver.scheme", cfg.solver.scheme);
  add("solver.dt", format_g17(cfg.solver.dt));
  add("solver.t_end", format_g17(cfg.solver.t_end));
  add("solver.picard_tol", format_g17(cfg.solver.picard_tol));
  add("solver.picard_max_iters", std::to_string(cfg.solver.picard_max_iters));
  add("solver.boundary_guard", format_g17(cfg.solver.boundary_guard));
  add("solver.snapshot_stride", std::to_string(cfg.solver.snapshot_stride));
  add("experiment.regime", cfg.experiment.regime);
  add("experiment.lambda", format_g17(cfg.experiment.lambda));
  add("experiment.fit_t_lo", format_g17(cfg.experiment.fit_t_lo));
  add("experiment.fit_t_hi", format_g17(cfg.experiment.fit_t_hi));
  add("experiment.gamma", format_g17(cfg.experiment.gamma));
  add("experiment.u0_amplitude", format_g17(cfg.experiment.u0_amplitude));
  add("experiment.u0_width", format_g17(cfg.experiment.u0_width));
  add("experiment.seed", std::to_string(cfg.experiment.seed));
  add("experiment.quality", std::to_string(cfg.experiment.quality));
  return out;
}

}  // namespace fkpp::config
