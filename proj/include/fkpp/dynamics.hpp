#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fkpp/common.hpp"
#include "fkpp/field.hpp"
#include "fkpp/reaction.hpp"
#include "fkpp/spaces.hpp"
#include "fkpp/symbol.hpp"

namespace fkpp::dynamics {

enum class Scheme { picard_duhamel, exponential_euler };

struct SolverConfig {
  Scheme scheme = Scheme::exponential_euler;
  double dt = 0.01;
  double t_end = 1.0;
  double picard_tol = 1e-10;
  std::size_t picard_max_iters = 64;
  /// Max |u| tolerated at the domain edge; beyond it the periodic
  /// truncation no longer represents the whole-space problem and the run
  /// aborts.  The permissive default only trips on genuine blow-up;
  /// spreading experiments tighten it to a fraction of the level set.
  double boundary_guard = 1.1;
  std::size_t snapshot_stride = 0;  // 0 keeps no snapshots
  /// When false, snapshots are never retained in the trajectory; observers
  /// still fire on the stride cadence.  Large spreading runs use this to
  /// stream front positions without holding fields.
  bool store_snapshots = true;
};

/// Rejects invalid dt/t_end and, for the fixed-point scheme, dt outside the
/// contraction window 1/(4 f'(0)).
void validate_solver(const SolverConfig& cfg, const ReactionKPP& f);

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t picard_iters = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
};

/// One exponential-Euler step u+ = T_dt u + dt T_dt f(u), evaluated in the
/// fused form T_dt(u + dt f(u)) so each step costs one transform pair.
class ExponentialEulerStepper {
 public:
  ExponentialEulerStepper(const UniformGrid& grid, const SymbolSpec& spec,
                          const ReactionKPP& f, double dt);
  void step(AlignedVector<double>& u);
  double dt() const { return dt_; }

 private:
  Propagator prop_;
  ReactionKPP f_;
  double dt_;
};

/// Fixed-point step for the integral form
///   u+ = T_dt u + \int_0^dt T_(dt-r) f(v(r)) dr,
/// collocated at the two Gauss-Legendre nodes r_i in (0, dt).  The node
/// values v_i are the unknowns of a Picard iteration; between nodes v(r) is
/// reconstructed by linear interpolation through (0, u), (r1, v1), (r2, v2),
/// and the stage integrals over [0, r_i] use the same two-point rule.
/// Converges when successive node sweeps move less than picard_tol in sup
/// norm; requires dt within the contraction window.
class PicardStepper {
 public:
  PicardStepper(const UniformGrid& grid, const SymbolSpec& spec,
                const ReactionKPP& f, double dt, double tol,
                std::size_t max_iters);
  /// Advances u in place; returns the number of sweeps used.
  std::size_t step(AlignedVector<double>& u);
  double dt() const { return dt_; }

 private:
  ReactionKPP f_;
  double dt_, tol_;
  std::size_t max_iters_;
  double seg2_frac_;  // interpolation weight of the second-segment node
  Propagator base1_, base2_;    // T_(r1), T_(r2)
  Propagator in11_, in12_;      // stage-1 inner: T_(r1 (1 - a_j))
  Propagator in21_, in22_;      // stage-2 inner: T_(r2 (1 - a_j))
  Propagator fin1_, fin2_;      // T_(dt - r_j)
  Propagator full_;             // T_dt
  AlignedVector<double> b1_, b2_, v1_, v2_, new1_, new2_, work_, feval_;
};

using SnapshotFn =
    std::function<void(double t, const AlignedVector<double>& u)>;

/// Evolves u0 to t_end.  Diagnostics (mass, min, max, sweeps) are recorded
/// every step; snapshots every snapshot_stride steps plus both endpoints.
/// Aborts on range violations beyond 1e-8 and on boundary-guard violations.
Trajectory solve(const UniformGrid& grid, const SymbolSpec& spec,
                 const ReactionKPP& f, const Field& u0,
                 const SolverConfig& cfg, const SnapshotFn& on_snapshot = {});

struct ComparisonReport {
  double max_order_violation = 0.0;  // sup over time of max (u_low - u_high)+
  double range_defect = 0.0;         // worst excursion outside [0, 1]
  std::vector<CheckResult> checks;
};

/// Co-evolves ordered initial data with the same stepper and verifies the
/// order is preserved at every step.
ComparisonReport check_comparison(const UniformGrid& grid,
                                  const SymbolSpec& spec, const ReactionKPP& f,
                                  const Field& u_low0, const Field& u_high0,
                                  const SolverConfig& cfg,
                                  double order_tol = 1e-10);

struct BarrierIterationRow {
  std::size_t k = 0;
  double t = 0.0;
  double radius = 0.0;     // r0 e^(sigma k t0)
  double min_on_ball = 0.0;
  bool holds = false;
};

struct BarrierIterationReport {
  double sigma = 0.0;
  double sigma_star = 0.0;  // f'(0) / (N + 2s)
  double eps = 0.0;
  std::vector<BarrierIterationRow> rows;
  bool all_hold = false;
};

/// Starts from the power-law barrier and checks the expanding plateau
/// u(k t0, x) >= eps on |x| <= r0 e^(sigma k t0) for k = 0..k_max.
/// Expected to hold for sigma below sigma_star and to fail above it.
BarrierIterationReport run_barrier_iteration(
    const UniformGrid& grid, const SymbolSpec& spec, const ReactionKPP& f,
    const spaces::PowerLawBarrier& barrier, double sigma, double t0,
    std::size_t k_max, const SolverConfig& cfg);

}  // namespace fkpp::dynamics
