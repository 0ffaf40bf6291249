#include "fkpp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace fkpp::dynamics {

namespace {

// Gauss-Legendre nodes on (0, 1).
const double kA1 = 0.5 * (1.0 - 1.0 / std::sqrt(3.0));
const double kA2 = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));

double edge_max_abs(const UniformGrid& g, const AlignedVector<double>& u) {
  std::size_t n = g.points_per_axis();
  if (g.dim() == 1) return std::max(std::abs(u[0]), std::abs(u[n - 1]));
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    m = std::max(m, std::abs(u[j]));           // row x = -L
    m = std::max(m, std::abs(u[j * n]));       // column y = -L
  }
  return m;
}

double sup_diff(const AlignedVector<double>& a, const AlignedVector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

void validate_solver(const SolverConfig& cfg, const ReactionKPP& f) {
  if (!(cfg.dt > 0.0)) throw InvalidArgument("solver dt must be positive");
  if (!(cfg.t_end >= 0.0)) throw InvalidArgument("solver t_end must be >= 0");
  if (cfg.scheme == Scheme::picard_duhamel) {
    double window = f.contraction_window();
    if (cfg.dt > window * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "dt = " << cfg.dt << " exceeds the contraction window 1/(4 f'(0)) = "
          << window;
      throw InvalidArgument(msg.str());
    }
    if (!(cfg.picard_tol > 0.0))
      throw InvalidArgument("picard_tol must be positive");
    if (cfg.picard_max_iters == 0)
      throw InvalidArgument("picard_max_iters must be positive");
  }
  if (!(cfg.boundary_guard > 0.0))
    throw InvalidArgument("boundary_guard must be positive");
}

ExponentialEulerStepper::ExponentialEulerStepper(const UniformGrid& grid,
                                                 const SymbolSpec& spec,
                                                 const ReactionKPP& f, double dt)
    : prop_(grid, spec, dt), f_(f), dt_(dt) {
  if (!(dt > 0.0)) throw InvalidArgument("stepper dt must be positive");
}

void ExponentialEulerStepper::step(AlignedVector<double>& u) {
  for (auto& x : u) x += dt_ * f_(x);
  prop_.apply_inplace(u);
}

PicardStepper::PicardStepper(const UniformGrid& grid, const SymbolSpec& spec,
                             const ReactionKPP& f, double dt, double tol,
                             std::size_t max_iters)
    : f_(f),
      dt_(dt),
      tol_(tol),
      max_iters_(max_iters),
      seg2_frac_((kA2 * kA2 - kA1) / (kA2 - kA1)),
      base1_(grid, spec, kA1 * dt),
      base2_(grid, spec, kA2 * dt),
      in11_(grid, spec, kA1 * dt * (1.0 - kA1)),
      in12_(grid, spec, kA1 * dt * (1.0 - kA2)),
      in21_(grid, spec, kA2 * dt * (1.0 - kA1)),
      in22_(grid, spec, kA2 * dt * (1.0 - kA2)),
      fin1_(grid, spec, dt * (1.0 - kA1)),
      fin2_(grid, spec, dt * (1.0 - kA2)),
      full_(grid, spec, dt) {
  if (!(dt > 0.0)) throw InvalidArgument("stepper dt must be positive");
  if (dt > f.contraction_window() * (1.0 + 1e-12))
    throw InvalidArgument("dt exceeds the contraction window 1/(4 f'(0)) = " +
                          std::to_string(f.contraction_window()));
  std::size_t n = grid.size();
  for (auto* v : {&b1_, &b2_, &v1_, &v2_, &new1_, &new2_, &work_, &feval_})
    v->resize(n);
}

std::size_t PicardStepper::step(AlignedVector<double>& u) {
  const std::size_t n = u.size();
  const double r1 = kA1 * dt_, r2 = kA2 * dt_;

  b1_ = u; base1_.apply_inplace(b1_);
  b2_ = u; base2_.apply_inplace(b2_);
  v1_ = b1_;
  v2_ = b2_;

  // Evaluates f on the linear path reconstruction at an inner node, applies
  // the matching inner propagator, and accumulates weight * result.
  auto add_inner = [&](AlignedVector<double>& acc, double weight,
                       const Propagator& prop, auto&& interp) {
    for (std::size_t i = 0; i < n; ++i) feval_[i] = f_(interp(i));
    prop.apply_inplace(feval_);
    for (std::size_t i = 0; i < n; ++i) acc[i] += weight * feval_[i];
  };

  std::size_t sweeps = 0;
  bool converged = false;
  while (sweeps < max_iters_ && !converged) {
    ++sweeps;
    // Stage 1: integral over [0, r1]; both inner nodes sit on segment
    // [0, r1], where v interpolates between u and v1.
    new1_ = b1_;
    add_inner(new1_, 0.5 * r1, in11_,
              [&](std::size_t i) { return u[i] + kA1 * (v1_[i] - u[i]); });
    add_inner(new1_, 0.5 * r1, in12_,
              [&](std::size_t i) { return u[i] + kA2 * (v1_[i] - u[i]); });
    // Stage 2: integral over [0, r2]; first inner node lands on [0, r1]
    // (at fraction a2 of it), the second on [r1, r2].
    new2_ = b2_;
    add_inner(new2_, 0.5 * r2, in21_,
              [&](std::size_t i) { return u[i] + kA2 * (v1_[i] - u[i]); });
    add_inner(new2_, 0.5 * r2, in22_, [&](std::size_t i) {
      return v1_[i] + seg2_frac_ * (v2_[i] - v1_[i]);
    });

    double change = std::max(sup_diff(new1_, v1_), sup_diff(new2_, v2_));
    v1_.swap(new1_);
    v2_.swap(new2_);
    converged = change <= tol_;
  }
  if (!converged)
    throw RunAborted("fixed-point sweep failed to converge within " +
                     std::to_string(max_iters_) + " iterations");

  // Final combination: quadrature of the Duhamel integral at the nodes.
  work_ = u;
  full_.apply_inplace(work_);
  for (std::size_t i = 0; i < n; ++i) feval_[i] = f_(v1_[i]);
  fin1_.apply_inplace(feval_);
  for (std::size_t i = 0; i < n; ++i) work_[i] += 0.5 * dt_ * feval_[i];
  for (std::size_t i = 0; i < n; ++i) feval_[i] = f_(v2_[i]);
  fin2_.apply_inplace(feval_);
  for (std::size_t i = 0; i < n; ++i) work_[i] += 0.5 * dt_ * feval_[i];
  u.swap(work_);
  return sweeps;
}

Trajectory solve(const UniformGrid& grid, const SymbolSpec& spec,
                 const ReactionKPP& f, const Field& u0, const SolverConfig& cfg,
                 const SnapshotFn& on_snapshot) {
  validate_solver(cfg, f);
  if (!(u0.grid() == grid))
    throw InvalidArgument("initial data grid does not match solver grid");
  double steps_real = cfg.t_end / cfg.dt;
  auto n_steps = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(n_steps)) >
      1e-9 * std::max(1.0, steps_real))
    throw InvalidArgument("t_end must be an integer number of dt steps");

  AlignedVector<double> u = u0.values();
  double cell = std::pow(grid.dx(), grid.dim());

  std::unique_ptr<ExponentialEulerStepper> euler;
  std::unique_ptr<PicardStepper> picard;
  if (cfg.scheme == Scheme::picard_duhamel)
    picard = std::make_unique<PicardStepper>(grid, spec, f, cfg.dt,
                                             cfg.picard_tol,
                                             cfg.picard_max_iters);
  else
    euler = std::make_unique<ExponentialEulerStepper>(grid, spec, f, cfg.dt);

  Trajectory traj;
  auto record = [&](double t, std::size_t iters) {
    double mn = u[0], mx = u[0], sum = 0.0;
    for (double x : u) {
      mn = std::min(mn, x);
      mx = std::max(mx, x);
      sum += x;
    }
    traj.diagnostics.push_back({t, sum * cell, mn, mx, iters});
    if (mn < -1e-8 || mx > 1.0 + 1e-8) {
      std::ostringstream msg;
      msg << "solution left [0,1] beyond tolerance at t = " << t
          << " (min = " << mn << ", max = " << mx << ")";
      throw RunAborted(msg.str());
    }
    double edge = edge_max_abs(grid, u);
    if (edge > cfg.boundary_guard) {
      std::ostringstream msg;
      msg << "boundary guard tripped at t = " << t << ": |u| = " << edge
          << " at the domain edge exceeds " << cfg.boundary_guard;
      throw RunAborted(msg.str());
    }
  };
  auto snapshot = [&](double t) {
    traj.times.push_back(t);
    traj.snapshots.push_back(Field::from_values(grid, u));
  };

  record(0.0, 0);
  if (cfg.snapshot_stride > 0 && cfg.store_snapshots) snapshot(0.0);
  if (on_snapshot) on_snapshot(0.0, u);

  for (std::size_t step = 1; step <= n_steps; ++step) {
    std::size_t iters = 0;
    if (picard)
      iters = picard->step(u);
    else
      euler->step(u);
    double t = static_cast<double>(step) * cfg.dt;
    record(t, iters);
    bool is_last = step == n_steps;
    if (cfg.snapshot_stride > 0 && cfg.store_snapshots &&
        (step % cfg.snapshot_stride == 0 || is_last) &&
        !(traj.times.size() && traj.times.back() == t))
      snapshot(t);
    if (on_snapshot &&
        ((cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0) ||
         is_last || cfg.snapshot_stride == 0))
      on_snapshot(t, u);
  }
  return traj;
}

ComparisonReport check_comparison(const UniformGrid& grid,
                                  const SymbolSpec& spec, const ReactionKPP& f,
                                  const Field& u_low0, const Field& u_high0,
                                  const SolverConfig& cfg, double order_tol) {
  validate_solver(cfg, f);
  AlignedVector<double> lo = u_low0.values();
  AlignedVector<double> hi = u_high0.values();
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i])
      throw InvalidArgument("comparison requires ordered initial data");

  auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  std::unique_ptr<ExponentialEulerStepper> euler;
  std::unique_ptr<PicardStepper> pic_lo, pic_hi;
  if (cfg.scheme == Scheme::picard_duhamel) {
    pic_lo = std::make_unique<PicardStepper>(grid, spec, f, cfg.dt,
                                             cfg.picard_tol, cfg.picard_max_iters);
    pic_hi = std::make_unique<PicardStepper>(grid, spec, f, cfg.dt,
                                             cfg.picard_tol, cfg.picard_max_iters);
  } else {
    euler = std::make_unique<ExponentialEulerStepper>(grid, spec, f, cfg.dt);
  }

  ComparisonReport rep;
  auto scan = [&]() {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      rep.max_order_violation =
          std::max(rep.max_order_violation, lo[i] - hi[i]);
      rep.range_defect = std::max({rep.range_defect, -lo[i], lo[i] - 1.0,
                                   -hi[i], hi[i] - 1.0});
    }
  };
  scan();
  for (std::size_t step = 1; step <= n_steps; ++step) {
    if (pic_lo) {
      pic_lo->step(lo);
      pic_hi->step(hi);
    } else {
      euler->step(lo);
      euler->step(hi);
    }
    scan();
  }
  rep.checks.push_back(
      check_leq("order_preserved", rep.max_order_violation, order_tol));
  rep.checks.push_back(check_leq("range_preserved", rep.range_defect, order_tol));
  return rep;
}

BarrierIterationReport run_barrier_iteration(
    const UniformGrid& grid, const SymbolSpec& spec, const ReactionKPP& f,
    const spaces::PowerLawBarrier& barrier, double sigma, double t0,
    std::size_t k_max, const SolverConfig& cfg) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (!(t0 > 0.0)) throw InvalidArgument("t0 must be positive");
  BarrierIterationReport rep;
  rep.sigma = sigma;
  rep.sigma_star =
      f.fprime0() / (static_cast<double>(grid.dim()) + 2.0 * spec.s);
  rep.eps = spaces::barrier_plateau(barrier, grid.dim());
  double final_radius =
      barrier.r0 * std::exp(sigma * static_cast<double>(k_max) * t0);
  if (final_radius > 0.9 * grid.half_width())
    throw InvalidArgument("claimed plateau outgrows the domain; enlarge half_width");

  SolverConfig run = cfg;
  run.t_end = static_cast<double>(k_max) * t0;
  auto steps_per_block = static_cast<std::size_t>(std::llround(t0 / run.dt));
  if (std::abs(steps_per_block * run.dt - t0) > 1e-9)
    throw InvalidArgument("t0 must be an integer number of dt steps");
  run.snapshot_stride = steps_per_block;

  auto min_on_ball = [&](const AlignedVector<double>& u, double radius) {
    double mn = 1e300;
    std::size_t n = grid.points_per_axis();
    if (grid.dim() == 1) {
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(grid.coord(j)) <= radius) mn = std::min(mn, u[j]);
    } else {
      for (std::size_t j0 = 0; j0 < n; ++j0)
        for (std::size_t j1 = 0; j1 < n; ++j1)
          if (std::hypot(grid.coord(j0), grid.coord(j1)) <= radius)
            mn = std::min(mn, u[j0 * n + j1]);
    }
    return mn;
  };

  Field u0 = spaces::barrier_field(grid, barrier);
  std::size_t next_k = 0;
  solve(grid, spec, f, u0, run, [&](double t, const AlignedVector<double>& u) {
    double expect = static_cast<double>(next_k) * t0;
    if (std::abs(t - expect) > 1e-9 || next_k > k_max) return;
    BarrierIterationRow row;
    row.k = next_k;
    row.t = t;
    row.radius = barrier.r0 * std::exp(sigma * t);
    row.min_on_ball = min_on_ball(u, row.radius);
    row.holds = row.min_on_ball >= rep.eps * (1.0 - 1e-9);
    rep.rows.push_back(row);
    ++next_k;
  });
  rep.all_hold = !rep.rows.empty() && rep.rows.size() == k_max + 1;
  for (const auto& r : rep.rows) rep.all_hold = rep.all_hold && r.holds;
  return rep;
}

}  // namespace fkpp::dynamics
