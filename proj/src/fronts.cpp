#include "fkpp/fronts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "fkpp/symbol.hpp"

namespace fkpp::fronts {
namespace {

void require_1d(const UniformGrid& grid, const char* what) {
  if (grid.dim() != 1) {
    std::ostringstream msg;
    msg << what << " supports one-dimensional grids only";
    throw InvalidArgument(msg.str());
  }
}

void require_threshold(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream msg;
    msg << "threshold " << lambda << " must lie in (0, 1)";
    throw InvalidArgument(msg.str());
  }
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 1.0;
};

LineFit least_squares(const std::vector<double>& t,
                      const std::vector<double>& y) {
  std::size_t m = t.size();
  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    tbar += t[i];
    ybar += y[i];
  }
  tbar /= static_cast<double>(m);
  ybar /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (t[i] - tbar) * (t[i] - tbar);
    sxy += (t[i] - tbar) * (y[i] - ybar);
  }
  if (sxx == 0.0) throw InvalidArgument("rate fit has a degenerate time axis");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * tbar;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double resid = y[i] - (fit.intercept + fit.slope * t[i]);
    ss_res += resid * resid;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared =
      ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  if (m > 2 && sxx > 0.0)
    fit.stderr_slope = std::sqrt(ss_res / (static_cast<double>(m - 2) * sxx));
  return fit;
}

}  // namespace

std::optional<double> front_radius(const UniformGrid& grid,
                                   const AlignedVector<double>& u,
                                   double lambda, double mask_radius) {
  require_1d(grid, "front extraction");
  require_threshold(lambda);
  if (u.size() != grid.size())
    throw InvalidArgument("field length does not match the grid");
  std::size_t n = grid.points_per_axis();
  double dx = grid.dx();
  std::optional<double> best;
  for (std::size_t j = 0; j < n; ++j) {
    double x = grid.coord(j);
    if (std::abs(x) > mask_radius || u[j] < lambda) continue;
    // Refine toward the outward neighbor where the level is crossed.
    double r = std::abs(x);
    std::size_t out = j;
    if (x >= 0.0 && j + 1 < n)
      out = j + 1;
    else if (x < 0.0 && j > 0)
      out = j - 1;
    if (out != j && u[out] < lambda && u[j] > u[out])
      r += dx * (u[j] - lambda) / (u[j] - u[out]);
    if (!best || r > *best) best = r;
  }
  return best;
}

FrontTracker::FrontTracker(const UniformGrid& grid, double lambda,
                           std::string regime, double mask_fraction)
    : grid_(grid) {
  require_1d(grid, "front extraction");
  require_threshold(lambda);
  if (!(mask_fraction > 0.0 && mask_fraction <= 1.0))
    throw InvalidArgument("mask fraction must lie in (0, 1]");
  mask_radius_ = mask_fraction * grid.half_width();
  trace_.lambda = lambda;
  trace_.regime = std::move(regime);
}

void FrontTracker::observe(double t, const AlignedVector<double>& u) {
  if (!trace_.times.empty() && t <= trace_.times.back()) return;
  auto r = front_radius(grid_, u, trace_.lambda, mask_radius_);
  if (!r) return;
  trace_.times.push_back(t);
  trace_.radii.push_back(*r);
}

FrontTrace extract_front(const dynamics::Trajectory& traj,
                         const UniformGrid& grid, double lambda,
                         std::string regime, double mask_fraction) {
  if (traj.snapshots.empty())
    throw InvalidArgument("trajectory holds no snapshots");
  FrontTracker tracker(grid, lambda, std::move(regime), mask_fraction);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
    tracker.observe(traj.times[i], traj.snapshots[i].values());
  if (tracker.trace().size() == 0) {
    std::ostringstream msg;
    msg << "threshold " << lambda << " is never attained in any snapshot";
    throw InvalidArgument(msg.str());
  }
  return tracker.take();
}

RateFit fit_rate(const FrontTrace& trace, RateModel model, double t_lo,
                 double t_hi) {
  if (!(t_lo < t_hi)) throw InvalidArgument("rate fit window is degenerate");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    double t = trace.times[i];
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    double r = trace.radii[i];
    if (model == RateModel::exponential) {
      if (!(r > 0.0))
        throw InvalidArgument(
            "exponential rate fit requires strictly positive radii");
      ys.push_back(std::log(r));
    } else {
      ys.push_back(r);
    }
    ts.push_back(t);
  }
  if (ts.size() < 5) {
    std::ostringstream msg;
    msg << "rate fit window [" << t_lo << ", " << t_hi << "] holds "
        << ts.size() << " samples; need at least 5";
    throw InvalidArgument(msg.str());
  }
  LineFit line = least_squares(ts, ys);
  RateFit fit;
  fit.model = model;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.estimate = line.slope;
  fit.intercept = line.intercept;
  fit.stderr_est = line.stderr_slope;
  fit.r_squared = line.r_squared;
  fit.n_samples = ts.size();
  return fit;
}

ModelSelection select_model(const FrontTrace& trace, double t_lo,
                            double t_hi) {
  ModelSelection sel;
  sel.exponential = fit_rate(trace, RateModel::exponential, t_lo, t_hi);
  sel.linear = fit_rate(trace, RateModel::linear, t_lo, t_hi);
  sel.preferred = sel.exponential.r_squared >= sel.linear.r_squared
                      ? RateModel::exponential
                      : RateModel::linear;
  sel.delta_r2 = std::abs(sel.exponential.r_squared - sel.linear.r_squared);
  return sel;
}

double local_speed(const FrontTrace& trace, double t, int half_window) {
  if (trace.size() < 2)
    throw InvalidArgument("local speed needs at least 2 samples");
  if (half_window < 1) throw InvalidArgument("half window must be >= 1");
  std::size_t nearest = 0;
  double best = std::abs(trace.times[0] - t);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    double d = std::abs(trace.times[i] - t);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  std::size_t lo = nearest >= static_cast<std::size_t>(half_window)
                       ? nearest - static_cast<std::size_t>(half_window)
                       : 0;
  std::size_t hi = std::min(trace.size() - 1,
                            nearest + static_cast<std::size_t>(half_window));
  std::vector<double> ts(trace.times.begin() + static_cast<long>(lo),
                         trace.times.begin() + static_cast<long>(hi) + 1);
  std::vector<double> rs(trace.radii.begin() + static_cast<long>(lo),
                         trace.radii.begin() + static_cast<long>(hi) + 1);
  return least_squares(ts, rs).slope;
}

double moving_frame_speed_ratio(const FrontTrace& trace, double t_early,
                                double t_late) {
  if (trace.size() < 10) {
    std::ostringstream msg;
    msg << "moving-frame ratio needs at least 10 samples; have "
        << trace.size();
    throw InvalidArgument(msg.str());
  }
  double v_early = local_speed(trace, t_early);
  double v_late = local_speed(trace, t_late);
  if (!(v_early > 0.0))
    throw InvalidArgument("front speed at the early window is not positive");
  return v_late / v_early;
}

double traveling_wave_residual(const Field& phi, const SymbolSpec& spec,
                               const dynamics::ReactionKPP& f, double c,
                               double mask_fraction) {
  const UniformGrid& grid = phi.grid();
  require_1d(grid, "traveling-wave residual");
  Field p = phi.space() == Space::physical ? phi : to_physical(phi);
  Field lp = apply_generator(p, spec);
  Field dp = apply_derivative(p, 0);
  const auto& pv = p.values();
  const auto& lv = lp.values();
  const auto& dv = dp.values();
  double mask_radius = mask_fraction * grid.half_width();
  double sup = 0.0;
  for (std::size_t j = 0; j < pv.size(); ++j) {
    if (std::abs(grid.coord(j)) > mask_radius) continue;
    double resid = lv[j] + c * dv[j] - f(pv[j]);
    sup = std::max(sup, std::abs(resid));
  }
  return sup;
}

Field wave_profile(const UniformGrid& grid, double width, double separation) {
  require_1d(grid, "wave profile");
  if (!(width > 0.0)) throw InvalidArgument("profile width must be positive");
  if (!(separation > 0.0 && separation < grid.half_width()))
    throw InvalidArgument("front separation must lie inside the domain");
  return field_from_function(grid, [=](double x, double) {
    return 0.25 * (1.0 + std::tanh((x + separation) / width)) *
           (1.0 - std::tanh((x - separation) / width));
  });
}

WaveSweepReport traveling_wave_sweep(const UniformGrid& grid,
                                     const SymbolSpec& spec,
                                     const dynamics::ReactionKPP& f,
                                     const std::vector<double>& widths,
                                     const std::vector<double>& speeds,
                                     double floor) {
  if (widths.empty() || speeds.empty())
    throw InvalidArgument("sweep needs at least one width and one speed");
  WaveSweepReport rep;
  double separation = grid.half_width() / 2.0;
  for (double w : widths) {
    Field phi = wave_profile(grid, w, separation);
    for (double c : speeds)
      rep.rows.push_back({w, c, traveling_wave_residual(phi, spec, f, c)});
  }
  rep.min_residual = rep.rows[0].residual;
  for (const auto& row : rep.rows)
    rep.min_residual = std::min(rep.min_residual, row.residual);

  double c_probe = 0.0;
  for (double c : speeds)
    if (std::abs(c) > std::abs(c_probe)) c_probe = c;
  Field zero = field_from_function(grid, [](double, double) { return 0.0; });
  Field one = field_from_function(grid, [](double, double) { return 1.0; });
  rep.checks.push_back(check_leq("constant_zero_residual",
                                 traveling_wave_residual(zero, spec, f, c_probe),
                                 1e-10));
  rep.checks.push_back(check_leq("constant_one_residual",
                                 traveling_wave_residual(one, spec, f, c_probe),
                                 1e-10));
  rep.checks.push_back(make_check("family_min_residual_floor",
                                  rep.min_residual, floor,
                                  rep.min_residual >= floor));
  return rep;
}

Field bump_initial_data(const UniformGrid& grid, double amplitude,
                        double width) {
  if (!(amplitude > 0.0 && amplitude <= 1.0))
    throw InvalidArgument("bump amplitude must lie in (0, 1]");
  if (!(width > 0.0)) throw InvalidArgument("bump width must be positive");
  return field_from_function(grid, [=](double x, double y) {
    double q = (x * x + y * y) / (width * width);
    double v = 1.0 - q;
    return v > 0.0 ? amplitude * v * v : 0.0;
  });
}

SpreadRun run_spread_leg(const RegimeLeg& leg, const dynamics::ReactionKPP& f,
                         const std::vector<double>& lambdas,
                         double mask_fraction) {
  require_1d(leg.grid, "front extraction");
  if (lambdas.empty())
    throw InvalidArgument("spread run needs at least one threshold");
  std::vector<FrontTracker> trackers;
  trackers.reserve(lambdas.size());
  for (double lam : lambdas)
    trackers.emplace_back(leg.grid, lam, leg.name, mask_fraction);

  Field u0 = bump_initial_data(leg.grid, leg.u0_amplitude, leg.u0_width);
  dynamics::SolverConfig cfg = leg.solver;
  cfg.store_snapshots = false;
  if (cfg.snapshot_stride == 0)
    cfg.snapshot_stride = static_cast<std::size_t>(
        std::max(1.0, std::round(0.1 / cfg.dt)));

  SpreadRun out;
  out.trajectory = dynamics::solve(
      leg.grid, leg.symbol, f, u0, cfg,
      [&](double t, const AlignedVector<double>& u) {
        for (auto& tracker : trackers) tracker.observe(t, u);
      });
  for (auto& tracker : trackers) out.traces.push_back(tracker.take());
  return out;
}

RegimeSetup default_regime_setup(double s, double rate, double t_end,
                                 int quality) {
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  quality = std::clamp(quality, 1, 3);
  RegimeSetup setup;
  setup.reaction =
      dynamics::ReactionKPP(dynamics::ReactionForm::logistic, rate);
  setup.lambda = 0.5;
  setup.fit_t_lo = t_end / 2.0;
  setup.fit_t_hi = t_end;
  setup.full_window_start = std::min(2.0, t_end / 4.0);

  dynamics::SolverConfig solver;
  solver.scheme = dynamics::Scheme::exponential_euler;
  solver.dt = 0.01;
  solver.t_end = t_end;
  solver.boundary_guard = 0.45 * setup.lambda;
  solver.snapshot_stride = 10;
  solver.store_snapshots = false;

  auto nonlocal_points = static_cast<std::size_t>(1) << (18 + quality);

  RegimeLeg classical;
  classical.name = "classical";
  classical.symbol = make_symbol(s, true, false);
  classical.grid = make_grid(1, static_cast<std::size_t>(1) << 15, 512.0);
  classical.solver = solver;
  setup.legs.push_back(classical);

  RegimeLeg fractional;
  fractional.name = "fractional";
  fractional.symbol = make_symbol(s, false, true);
  fractional.grid = make_grid(1, nonlocal_points, 16384.0);
  fractional.solver = solver;
  setup.legs.push_back(fractional);

  RegimeLeg mixed = fractional;
  mixed.name = "mixed";
  mixed.symbol = make_symbol(s, true, true);
  setup.legs.push_back(mixed);
  return setup;
}

RegimeReport regime_comparison(const RegimeSetup& setup) {
  if (setup.legs.empty())
    throw InvalidArgument("regime comparison needs at least one leg");
  RegimeReport rep;
  const double c_star = 2.0 * std::sqrt(setup.reaction.fprime0());
  std::optional<double> sigma_fractional, sigma_mixed;

  for (const auto& leg : setup.legs) {
    SpreadRun run = run_spread_leg(leg, setup.reaction, {setup.lambda});
    FrontTrace trace = std::move(run.traces[0]);
    if (trace.size() == 0) {
      std::ostringstream msg;
      msg << leg.name << ": threshold " << setup.lambda
          << " was never attained";
      throw RunAborted(msg.str());
    }
    bool classical = leg.name == "classical";
    RegimeLegResult res;
    res.name = leg.name;
    res.preferred_fit = fit_rate(
        trace, classical ? RateModel::linear : RateModel::exponential,
        setup.fit_t_lo, setup.fit_t_hi);
    // The linear-vs-exponential verdict for the classical leg needs the
    // curvature accumulated over the whole run; the late window alone is
    // locally near-linear in both regression spaces.
    res.selection = select_model(
        trace, classical ? setup.full_window_start : setup.fit_t_lo,
        setup.fit_t_hi);
    res.trace = std::move(trace);
    rep.legs.push_back(std::move(res));
    const RegimeLegResult& back = rep.legs.back();

    double estimate = back.preferred_fit.estimate;
    if (classical) {
      rep.checks.push_back(check_leq(leg.name + "_rate_rel_error",
                                     std::abs(estimate - c_star) / c_star,
                                     0.10));
      double margin = back.selection.linear.r_squared -
                      back.selection.exponential.r_squared;
      rep.checks.push_back(make_check(leg.name + "_model_selection_margin",
                                      margin, 0.05, margin >= 0.05));
    } else {
      double sigma_star =
          setup.reaction.fprime0() / (1.0 + 2.0 * leg.symbol.s);
      rep.checks.push_back(check_leq(
          leg.name + "_rate_rel_error",
          std::abs(estimate - sigma_star) / sigma_star, 0.15));
      double margin = back.selection.exponential.r_squared -
                      back.selection.linear.r_squared;
      rep.checks.push_back(make_check(leg.name + "_model_selection_margin",
                                      margin, 0.05, margin >= 0.05));
      if (leg.name == "fractional")
        sigma_fractional = estimate;
      else if (leg.name == "mixed")
        sigma_mixed = estimate;
    }
  }

  if (sigma_fractional && sigma_mixed) {
    double mean = 0.5 * (*sigma_fractional + *sigma_mixed);
    double gap = std::abs(*sigma_fractional - *sigma_mixed) / std::abs(mean);
    rep.checks.push_back(check_leq("fractional_mixed_rate_gap", gap, 0.10));
  }
  return rep;
}

}  // namespace fkpp::fronts
