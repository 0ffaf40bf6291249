#include "fkpp/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace fkpp::spaces {

namespace {

template <class Fn>
void for_each_radius(const UniformGrid& g, Fn&& fn) {
  std::size_t n = g.points_per_axis();
  if (g.dim() == 1) {
    for (std::size_t j = 0; j < n; ++j) fn(j, std::abs(g.coord(j)));
  } else {
    for (std::size_t j0 = 0; j0 < n; ++j0)
      for (std::size_t j1 = 0; j1 < n; ++j1)
        fn(j0 * n + j1, std::hypot(g.coord(j0), g.coord(j1)));
  }
}

double tail_power(const UniformGrid& g, double s) {
  return static_cast<double>(g.dim()) + 2.0 * s;
}

}  // namespace

WeightedNorm make_weighted_norm(double gamma, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw InvalidArgument("weighted norm requires s in (0, 1)");
  if (gamma < 0.0 || gamma >= 2.0 * s)
    throw InvalidArgument("gamma must be < 2s");
  return WeightedNorm{gamma, s};
}

double xgamma_norm(const Field& u, double gamma) {
  if (gamma < 0.0) throw InvalidArgument("gamma must be >= 0");
  const auto& v = u.values();
  double worst = 0.0;
  for_each_radius(u.grid(), [&](std::size_t idx, double r) {
    double w = std::abs(v[idx]) / (1.0 + std::pow(r, gamma));
    worst = std::max(worst, w);
  });
  return worst;
}

PowerLawBarrier make_barrier(double a0, double r0, double s) {
  if (!(a0 > 0.0)) throw InvalidArgument("barrier amplitude a0 must be positive");
  if (!(r0 >= 1.0)) throw InvalidArgument("barrier radius r0 must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("barrier s must be in (0, 1)");
  return PowerLawBarrier{a0, r0, s};
}

double barrier_plateau(const PowerLawBarrier& b, int dim) {
  return b.a0 * std::pow(b.r0, -(static_cast<double>(dim) + 2.0 * b.s));
}

Field barrier_field(const UniformGrid& grid, const PowerLawBarrier& b) {
  double p = tail_power(grid, b.s);
  double eps = barrier_plateau(b, grid.dim());
  AlignedVector<double> vals(grid.size());
  for_each_radius(grid, [&](std::size_t idx, double r) {
    vals[idx] = r <= b.r0 ? eps : b.a0 * std::pow(r, -p);
  });
  return Field::from_values(grid, std::move(vals));
}

Field propagate(const Field& u, const SymbolSpec& spec, double t,
                PropagateRoute route) {
  if (route == PropagateRoute::multiplier) return apply_multiplier(u, spec, t);
  if (t == 0.0) return u;
  kernels::KernelTable k = kernels::spectral_kernel(u.grid(), t, spec);
  return convolve(k.values, u);
}

GrowthReport check_semigroup_growth(const UniformGrid& grid,
                                    const SymbolSpec& spec, double gamma,
                                    const std::vector<double>& times,
                                    std::uint64_t seed) {
  make_weighted_norm(gamma, spec.s);  // range check on gamma
  GrowthReport rep;
  rep.gamma = gamma;
  rep.times = times;

  std::vector<Field> probes;
  probes.push_back(field_from_function(grid, [](double, double) { return 1.0; }));
  probes.push_back(field_from_function(grid, [&](double x, double y) {
    return std::pow(std::hypot(x, y), gamma > 0.0 ? gamma : 1.0);
  }));
  probes.push_back(field_from_function(
      grid, [](double x, double y) { return std::hypot(x, y) <= 1.0 ? 1.0 : 0.0; }));
  probes.push_back(field_from_function(grid, [](double x, double y) {
    return std::hypot(x, y) <= 10.0 ? 1.0 : 0.0;
  }));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int r = 0; r < 3; ++r) {
    AlignedVector<double> vals(grid.size());
    for (auto& v : vals) v = unif(rng);
    probes.push_back(Field::from_values(grid, std::move(vals)));
  }

  double growth_min = 1e300, growth_max = 0.0;
  for (double t : times) {
    if (!(t > 0.0)) throw InvalidArgument("growth check times must be positive");
    double envelope =
        1.0 + std::pow(t, gamma / 2.0) + std::pow(t, gamma / (2.0 * spec.s));
    double worst = 0.0;
    for (const auto& p : probes) {
      double before = xgamma_norm(p, gamma);
      if (before == 0.0) continue;
      double after = xgamma_norm(propagate(p, spec, t), gamma);
      worst = std::max(worst, after / before);
    }
    double C = worst / envelope;
    rep.fitted_C.push_back(C);
    growth_min = std::min(growth_min, C);
    growth_max = std::max(growth_max, C);
    if (gamma == 0.0)
      rep.checks.push_back(check_leq("sup_contraction_t" + std::to_string(t),
                                     worst - 1.0, 1e-10));
  }
  rep.stability_ratio = growth_max / growth_min;
  rep.checks.push_back(check_leq("fitted_C_stability", rep.stability_ratio, 2.0));
  bool finite = std::isfinite(growth_max) && growth_min > 0.0;
  rep.checks.push_back(make_check("fitted_C_positive_finite", growth_max, 0.0, finite));
  return rep;
}

BarrierPushReport push_powerlaw_barrier(const UniformGrid& grid,
                                        const SymbolSpec& spec,
                                        const PowerLawBarrier& b, double t) {
  if (!(t >= 1.0))
    throw InvalidArgument("barrier push envelope is stated for t >= 1");
  BarrierPushReport rep;
  rep.t = t;
  double p = tail_power(grid, b.s);
  double dim = static_cast<double>(grid.dim());
  Field v0 = barrier_field(grid, b);
  Field vt = propagate(v0, spec, t);
  double eps = barrier_plateau(b, grid.dim());

  double lower_env = t / (std::pow(t, dim / (2.0 * spec.s) + 1.0) + 1.0);
  double upper_env = 1.0 + std::pow(b.r0, -2.0 * spec.s) * t;
  double bulk = grid.half_width() / 4.0;
  double lo_ratio = 1e300, hi_ratio = 0.0, plateau = 0.0;
  const auto& vals = vt.values();
  for_each_radius(grid, [&](std::size_t idx, double r) {
    if (r <= b.r0) {
      plateau = std::max(plateau, vals[idx]);
      return;
    }
    if (r > bulk) return;
    double ratio = vals[idx] * std::pow(r, p) / b.a0;
    lo_ratio = std::min(lo_ratio, ratio);
    hi_ratio = std::max(hi_ratio, ratio);
  });
  rep.fitted_lower = lo_ratio / lower_env;
  rep.fitted_upper = hi_ratio / upper_env;
  rep.plateau_sup = plateau;
  rep.checks.push_back(make_check("lower_envelope_positive", rep.fitted_lower,
                                  0.0, rep.fitted_lower > 0.0 &&
                                           std::isfinite(rep.fitted_lower)));
  rep.checks.push_back(make_check("upper_envelope_finite", rep.fitted_upper, 0.0,
                                  std::isfinite(rep.fitted_upper)));
  // Positive kernel with unit mass cannot push the profile above its sup.
  rep.checks.push_back(
      check_leq("plateau_within_sup", plateau - eps, 1e-10 * eps));
  return rep;
}

WeightPushReport push_polynomial_weight(const UniformGrid& grid,
                                        const SymbolSpec& spec, double gamma,
                                        double t) {
  make_weighted_norm(gamma, spec.s);
  if (!(t >= 1.0))
    throw InvalidArgument("weight push envelope is stated for t >= 1");
  WeightPushReport rep;
  rep.t = t;
  rep.gamma = gamma;
  Field w = field_from_function(grid, [&](double x, double y) {
    return std::pow(std::hypot(x, y), gamma);
  });
  Field wt = propagate(w, spec, t);
  const auto& vals = wt.values();
  if (gamma == 0.0) {
    double worst = 0.0;
    for (double v : vals) worst = std::max(worst, std::abs(v - 1.0));
    rep.fitted_upper = 1.0;
    rep.fitted_lower = 1.0;
    rep.checks.push_back(check_leq("constant_preserved", worst, 1e-12));
    return rep;
  }
  double bulk = grid.half_width() / 4.0;
  double t_scale = std::pow(t, gamma / (2.0 * spec.s));
  double crossover = std::pow(t, 1.0 / (2.0 * spec.s));
  double upper = 0.0, lower = 1e300;
  for_each_radius(grid, [&](std::size_t idx, double r) {
    if (r > bulk) return;
    upper = std::max(upper, vals[idx] / (std::pow(r, gamma) + t_scale));
    if (r >= crossover)
      lower = std::min(lower, vals[idx] / std::pow(r, gamma));
  });
  rep.fitted_upper = upper;
  rep.fitted_lower = lower;
  rep.checks.push_back(make_check(
      "upper_envelope_finite", upper, 0.0, std::isfinite(upper) && upper > 0.0));
  rep.checks.push_back(make_check(
      "lower_envelope_positive", lower, 0.0,
      std::isfinite(lower) && lower > 0.0));
  return rep;
}

MaxPrincipleReport check_discrete_max_principle(const UniformGrid& grid,
                                                const SymbolSpec& spec,
                                                std::size_t n_probes,
                                                std::uint64_t seed, double tol) {
  if (grid.dim() != 1)
    throw InvalidArgument("max-principle probe implemented for 1D grids");
  const std::size_t oversample = 8;
  std::size_t n_fine = grid.points_per_axis() * oversample;
  UniformGrid fine = make_grid(1, n_fine, grid.half_width());
  std::size_t band = grid.points_per_axis() / 16;
  if (band < 2) throw InvalidArgument("grid too small for band-limited probes");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MaxPrincipleReport rep;
  rep.probes = n_probes;
  double worst = 0.0;
  for (std::size_t p = 0; p < n_probes; ++p) {
    AlignedVector<std::complex<double>> coeffs(n_fine / 2 + 1,
                                               std::complex<double>(0.0, 0.0));
    coeffs[0] = gauss(rng);
    for (std::size_t k = 1; k <= band; ++k) {
      double decay = 1.0 / (1.0 + static_cast<double>(k));
      coeffs[k] = std::complex<double>(gauss(rng), gauss(rng)) * decay;
    }
    Field u = to_physical(Field::from_spectrum(fine, std::move(coeffs)));
    Field lu = apply_generator(u, spec);
    const auto& uv = u.values();
    const auto& lv = lu.values();
    std::size_t argmax = 0;
    double lu_sup = 0.0;
    for (std::size_t j = 0; j < n_fine; ++j) {
      if (uv[j] > uv[argmax]) argmax = j;
      lu_sup = std::max(lu_sup, std::abs(lv[j]));
    }
    if (lu_sup == 0.0) continue;
    worst = std::max(worst, -lv[argmax] / lu_sup);
  }
  rep.worst_defect = worst;
  rep.checks.push_back(check_leq("generator_sign_at_max", worst, tol));
  return rep;
}

}  // namespace fkpp::spaces
