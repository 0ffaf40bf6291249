#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fkpp/common.hpp"
#include "fkpp/dynamics.hpp"
#include "fkpp/grid.hpp"
#include "fkpp/reaction.hpp"
#include "fkpp/symbol.hpp"

namespace fkpp::config {

/// Typed mirror of the [grid] section.
struct GridSection {
  int dim = 1;
  std::size_t n = 4096;
  double half_width = 256.0;
};

/// Typed mirror of the [operator] section.
struct OperatorSection {
  double s = 0.5;
  bool local = true;
  bool fractional = true;
};

/// Typed mirror of the [reaction] section.
struct ReactionSection {
  std::string form = "logistic";
  double rate = 1.0;
  double exponent = 2.0;  // concave_power only; logistic pins 2
};

/// Typed mirror of the [solver] section.
struct SolverSection {
  std::string scheme = "exponential_euler";
  double dt = 0.01;
  double t_end = 1.0;
  double picard_tol = 1e-10;
  std::size_t picard_max_iters = 64;
  double boundary_guard = 1.1;
  std::size_t snapshot_stride = 0;
};

/// Typed mirror of the [experiment] section.  Negative fit-window endpoints
/// are sentinels resolved to [t_end/2, t_end].
struct ExperimentSection {
  std::string regime = "mixed";
  double lambda = 0.5;
  double fit_t_lo = -1.0;
  double fit_t_hi = -1.0;
  double gamma = 0.0;
  double u0_amplitude = 0.5;
  double u0_width = 1.0;
  std::uint64_t seed = 2026;
  int quality = 1;
};

struct RunConfig {
  GridSection grid;
  OperatorSection op;
  ReactionSection reaction;
  SolverSection solver;
  ExperimentSection experiment;

  UniformGrid make_grid() const;
  SymbolSpec make_operator() const;
  dynamics::ReactionKPP make_reaction() const;
  dynamics::SolverConfig make_solver() const;
};

/// All defaults, unvalidated.
RunConfig default_config();

/// Parses INI-style text (sections in brackets, key = value, # or ;
/// comments).  Unknown sections and keys are rejected by name.  The result
/// is merged over the defaults but not yet validated or resolved.
RunConfig parse_config_text(const std::string& text);

/// Reads the file, applies FKPP_<SECTION>_<KEY> environment overrides,
/// resolves defaults, and validates.  Everything the CLI consumes goes
/// through here.
RunConfig parse_config(const std::string& path);

/// Applies FKPP_<SECTION>_<KEY> environment overrides in place.
void apply_env_overrides(RunConfig& cfg);

/// Fills sentinel values (fit window) from their documented defaults.
void resolve(RunConfig& cfg);

/// Cross-field validation: grid/operator/reaction constructible, gamma
/// within the weighted-space range, dt inside the contraction window under
/// the fixed-point scheme.  Errors name the offending key.
void validate(const RunConfig& cfg);

/// Deterministic flat echo of every resolved key, in file order, for
/// manifests and --help documentation.
std::vector<std::pair<std::string, std::string>> flatten(const RunConfig& cfg);

/// Sets one key ("section.key" form) from a string value; used by the env
/// and CLI override paths.  Unknown keys are rejected by name.
void set_key(RunConfig& cfg, const std::string& dotted_key,
             const std::string& value);

}  // namespace fkpp::config
