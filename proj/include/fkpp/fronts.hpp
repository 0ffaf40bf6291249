#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fkpp/common.hpp"
#include "fkpp/dynamics.hpp"
#include "fkpp/field.hpp"

namespace fkpp::fronts {

/// Level-set radius history R_lambda(t): outermost |x| where u crosses
/// lambda, refined by linear interpolation between the bracketing lattice
/// points.  Snapshots that never reach lambda are omitted.
struct FrontTrace {
  double lambda = 0.5;
  std::string regime;
  std::vector<double> times;
  std::vector<double> radii;

  std::size_t size() const { return times.size(); }
};

/// Samples one snapshot; returns nullopt when the level is not attained
/// inside |x| <= mask_radius.
std::optional<double> front_radius(const UniformGrid& grid,
                                   const AlignedVector<double>& u,
                                   double lambda, double mask_radius);

/// Streaming extractor to feed from the solver's snapshot callback.
class FrontTracker {
 public:
  FrontTracker(const UniformGrid& grid, double lambda, std::string regime,
               double mask_fraction = 0.95);
  void observe(double t, const AlignedVector<double>& u);
  const FrontTrace& trace() const { return trace_; }
  FrontTrace take() { return std::move(trace_); }

 private:
  UniformGrid grid_;
  double mask_radius_;
  FrontTrace trace_;
};

/// Extracts the trace from stored snapshots; errors if the level is never
/// attained anywhere in the trajectory.
FrontTrace extract_front(const dynamics::Trajectory& traj,
                         const UniformGrid& grid, double lambda,
                         std::string regime = "", double mask_fraction = 0.95);

enum class RateModel { exponential, linear };

struct RateFit {
  RateModel model = RateModel::exponential;
  double t_lo = 0.0, t_hi = 0.0;
  double estimate = 0.0;   // sigma for exponential (log R ~ sigma t + b), c for linear
  double intercept = 0.0;
  double stderr_est = 0.0;
  double r_squared = 0.0;
  std::size_t n_samples = 0;
};

/// Least-squares rate fit over samples with t in [t_lo, t_hi]; needs at
/// least 5 samples in the window.  The exponential model regresses log R on
/// t; the linear model regresses R on t.
RateFit fit_rate(const FrontTrace& trace, RateModel model, double t_lo,
                 double t_hi);

struct ModelSelection {
  RateFit exponential;
  RateFit linear;
  double delta_r2 = 0.0;  // r2(winner) - r2(loser), winner by raw r2
  RateModel preferred = RateModel::exponential;
};

/// Fits both models on the same window and reports which wins with what
/// margin (each model's r2 measured in its own regression space).
ModelSelection select_model(const FrontTrace& trace, double t_lo, double t_hi);

/// Local front speed dR/dt near a time, by least-squares slope over the
/// nearest few samples.
double local_speed(const FrontTrace& trace, double t, int half_window = 2);

/// Ratio of late to early front speed; >> 1 signals acceleration.
double moving_frame_speed_ratio(const FrontTrace& trace, double t_early,
                                double t_late);

/// Stationary profile residual under the full operator in a frame moving at
/// speed c:  rho(c) = sup_bulk | L phi + c phi' - f(phi) |.
double traveling_wave_residual(const Field& phi, const SymbolSpec& spec,
                               const dynamics::ReactionKPP& f, double c,
                               double mask_fraction = 0.9);

/// Periodic surrogate for a monotone connection: a central plateau at 1
/// bounded by mirrored tanh fronts of the given width at +-separation,
/// decaying to 0 toward the domain edge.  Smoothly periodic as long as
/// the edge distance is many widths.
Field wave_profile(const UniformGrid& grid, double width, double separation);

struct WaveSweepRow {
  double width = 0.0;
  double c = 0.0;
  double residual = 0.0;
};

struct WaveSweepReport {
  std::vector<WaveSweepRow> rows;
  double min_residual = 0.0;
  std::vector<CheckResult> checks;
};

/// Sweeps profile widths and frame speeds; the minimum residual staying
/// bounded away from zero is evidence no profile in the family is
/// stationary in any frame.  Constants 0 and 1 are exact fixed points and
/// produce residual 0 (checked separately).
WaveSweepReport traveling_wave_sweep(const UniformGrid& grid,
                                     const SymbolSpec& spec,
                                     const dynamics::ReactionKPP& f,
                                     const std::vector<double>& widths,
                                     const std::vector<double>& speeds,
                                     double floor = 1e-2);

struct RegimeLeg {
  std::string name;            // classical | fractional | mixed
  SymbolSpec symbol;
  UniformGrid grid;
  dynamics::SolverConfig solver;
  double u0_amplitude = 0.5;
  double u0_width = 1.0;
};

struct RegimeSetup {
  dynamics::ReactionKPP reaction;
  double lambda = 0.5;
  double fit_t_lo = 8.0, fit_t_hi = 16.0;
  double full_window_start = 2.0;  // model selection uses [start, t_end]
  std::vector<RegimeLeg> legs;
};

struct SpreadRun {
  std::vector<FrontTrace> traces;  // one per requested threshold
  dynamics::Trajectory trajectory; // diagnostics; no stored fields
};

/// Evolves the leg's bump initial data and streams every strided snapshot
/// through one tracker per threshold; fields are never retained.
SpreadRun run_spread_leg(const RegimeLeg& leg, const dynamics::ReactionKPP& f,
                         const std::vector<double>& lambdas,
                         double mask_fraction = 0.95);

struct RegimeLegResult {
  std::string name;
  FrontTrace trace;
  RateFit preferred_fit;
  ModelSelection selection;
};

struct RegimeReport {
  std::vector<RegimeLegResult> legs;
  std::vector<CheckResult> checks;
};

/// Canonical three-regime setup (classical / fractional / mixed) for the
/// given s and rate; quality scales grid sizes.
RegimeSetup default_regime_setup(double s, double rate, double t_end = 16.0,
                                 int quality = 1);

/// Runs each leg, extracts fronts, fits both models, and issues the
/// verdicts: linear spread for the classical leg, exponential for the
/// nonlocal legs, and agreement between fractional and mixed rates.
RegimeReport regime_comparison(const RegimeSetup& setup);

/// Smooth compactly supported bump amplitude*(1-(x/width)^2)^2.
Field bump_initial_data(const UniformGrid& grid, double amplitude, double width);

}  // namespace fkpp::fronts
