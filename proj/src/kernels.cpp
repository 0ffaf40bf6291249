#include "fkpp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft_engine.hpp"

namespace fkpp::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

// Symbol decay target at the Nyquist frequency: e^-45 is below double
// rounding relative to kernel peaks, which keeps spectral truncation ringing
// (the only negativity source) under ~1e-13.
constexpr double kNyquistDecay = 45.0;

std::size_t next_pow2(double x) {
  std::size_t n = 8;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

double pow2_at_least(double x) {
  double v = 1.0;
  while (v < x) v *= 2.0;
  return v;
}

/// Smallest Xi with t * m(Xi) >= kNyquistDecay, by bisection.
double required_cutoff(const SymbolSpec& sym, double t) {
  double lo = 0.0, hi = 1.0;
  while (t * sym(hi) < kNyquistDecay) hi *= 2.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (t * sym(mid) < kNyquistDecay ? lo : hi) = mid;
  }
  return hi;
}

template <class Fn>
void for_each_lattice_radius(const UniformGrid& g, Fn&& fn) {
  std::size_t n = g.points_per_axis();
  if (g.dim() == 1) {
    for (std::size_t j = 0; j < n; ++j) fn(j, std::abs(g.coord(j)));
  } else {
    for (std::size_t j0 = 0; j0 < n; ++j0)
      for (std::size_t j1 = 0; j1 < n; ++j1)
        fn(j0 * n + j1, std::hypot(g.coord(j0), g.coord(j1)));
  }
}

KernelTable table_from_symbol(const UniformGrid& grid, double t,
                              const SymbolSpec& sym, Kind kind, double s) {
  std::size_t n = grid.points_per_axis();
  std::size_t half = n / 2 + 1;
  double cell = std::pow(2.0 * grid.half_width(), grid.dim());
  double amp = std::sqrt(static_cast<double>(grid.size())) / cell;
  AlignedVector<std::complex<double>> spec(
      detail::FftEngine::spectrum_size(grid.dim(), n));
  double dxi = grid.dxi();
  if (grid.dim() == 1) {
    for (std::size_t k = 0; k < half; ++k) {
      double parity = (k % 2 == 0) ? 1.0 : -1.0;
      spec[k] = parity * amp * std::exp(-t * sym(dxi * static_cast<double>(k)));
    }
  } else {
    for (std::size_t j0 = 0; j0 < n; ++j0) {
      double xi0 = dxi * static_cast<double>(grid.freq_index(j0));
      for (std::size_t j1 = 0; j1 < half; ++j1) {
        double xi = std::hypot(xi0, dxi * static_cast<double>(j1));
        double parity = ((j0 + j1) % 2 == 0) ? 1.0 : -1.0;
        spec[j0 * half + j1] = parity * amp * std::exp(-t * sym(xi));
      }
    }
  }
  KernelTable k;
  k.grid = grid;
  k.t = t;
  k.s = s;
  k.kind = kind;
  k.construction = Construction::spectral;
  k.values = to_physical(Field::from_spectrum(grid, std::move(spec)));
  return k;
}

}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::gaussian: return "gaussian";
    case Kind::fractional: return "fractional";
    case Kind::mixed: return "mixed";
  }
  return "?";
}

double tail_constant(int dim, double s) {
  double n = static_cast<double>(dim);
  return std::pow(2.0, 2.0 * s - 1.0) * 2.0 * s *
         std::tgamma((n + 2.0 * s) / 2.0) /
         (std::pow(kPi, n / 2.0) * std::tgamma(1.0 - s));
}

double alpha_constant(int dim, double s) {
  double n = static_cast<double>(dim);
  return std::pow(2.0, n + 2.0 * s) * std::pow(kPi, n / 2.0 - 1.0) * s *
         std::tgamma(n / 2.0 + s) * std::tgamma(s);
}

SymbolSpec kind_symbol(Kind kind, double s) {
  switch (kind) {
    case Kind::gaussian: return make_symbol(s, true, false);
    case Kind::fractional: return make_symbol(s, false, true);
    case Kind::mixed: return make_symbol(s, true, true);
  }
  throw InvalidArgument("unknown kernel kind");
}

UniformGrid suggest_grid(int dim, double t, double s, Kind kind,
                         double min_half_width, std::size_t max_points) {
  if (!(t > 0.0)) throw InvalidArgument("kernel time must be positive");
  SymbolSpec sym = kind_symbol(kind, s);
  double spread = 0.0;
  if (sym.include_local) spread = std::max(spread, std::sqrt(4.0 * t));
  if (sym.include_fractional)
    spread = std::max(spread, std::pow(t, 1.0 / (2.0 * s)));
  double half_width = pow2_at_least(std::max(min_half_width, 10.0 * spread));
  double cutoff = required_cutoff(sym, t);
  std::size_t total_budget = dim == 1 ? max_points : (1u << 11);
  // Resolving the symbol at Nyquist is what keeps lattice values
  // nonnegative, so when the point budget cannot afford both, the width
  // shrinks (toward the ~10-spread bulk) before resolution is given up.
  double width_floor = pow2_at_least(10.0 * spread);
  while (half_width > width_floor &&
         2.0 * half_width * cutoff / kPi >
             static_cast<double>(total_budget))
    half_width *= 0.5;
  double n_for_cutoff = 2.0 * half_width * cutoff / kPi;
  double n_for_peak = 16.0 * half_width / spread;
  std::size_t n = next_pow2(std::max({n_for_cutoff, n_for_peak, 4096.0}));
  n = std::min(n, total_budget);
  return make_grid(dim, std::max<std::size_t>(n, 8), half_width);
}

KernelTable gaussian_kernel(const UniformGrid& grid, double t) {
  if (!(t > 0.0)) throw InvalidArgument("kernel time must be positive");
  double pref = std::pow(4.0 * kPi * t, -0.5 * grid.dim());
  KernelTable k;
  k.grid = grid;
  k.t = t;
  k.s = 1.0;  // unused for the gaussian
  k.kind = Kind::gaussian;
  k.construction = Construction::closed_form;
  AlignedVector<double> vals(grid.size());
  for_each_lattice_radius(grid, [&](std::size_t idx, double r) {
    vals[idx] = pref * std::exp(-r * r / (4.0 * t));
  });
  k.values = Field::from_values(grid, std::move(vals));
  return k;
}

KernelTable fractional_kernel(const UniformGrid& grid, double t, double s) {
  if (!(t > 0.0)) throw InvalidArgument("kernel time must be positive");
  return table_from_symbol(grid, t, kind_symbol(Kind::fractional, s),
                           Kind::fractional, s);
}

KernelTable mixed_kernel(const UniformGrid& grid, double t, double s,
                         Construction how) {
  if (!(t > 0.0)) throw InvalidArgument("kernel time must be positive");
  if (how == Construction::spectral)
    return table_from_symbol(grid, t, kind_symbol(Kind::mixed, s), Kind::mixed, s);
  if (how == Construction::convolution) {
    KernelTable g2 = gaussian_kernel(grid, t);
    KernelTable gs = fractional_kernel(grid, t, s);
    KernelTable k;
    k.grid = grid;
    k.t = t;
    k.s = s;
    k.kind = Kind::mixed;
    k.construction = Construction::convolution;
    k.values = convolve(g2.values, gs.values);
    return k;
  }
  throw InvalidArgument("mixed kernel supports spectral or convolution construction");
}

KernelTable spectral_kernel(const UniformGrid& grid, double t,
                            const SymbolSpec& spec) {
  if (!(t > 0.0)) throw InvalidArgument("kernel time must be positive");
  Kind kind = spec.include_local
                  ? (spec.include_fractional ? Kind::mixed : Kind::gaussian)
                  : Kind::fractional;
  return table_from_symbol(grid, t, spec, kind, spec.s);
}

double kernel_mass(const KernelTable& k) {
  const auto& v = k.values.values();
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc * std::pow(k.grid.dx(), k.grid.dim());
}

double kernel_symmetry_defect(const KernelTable& k) {
  const auto& v = k.values.values();
  std::size_t n = k.grid.points_per_axis();
  double worst = 0.0;
  if (k.grid.dim() == 1) {
    for (std::size_t j = 1; j < n; ++j)
      worst = std::max(worst, std::abs(v[j] - v[n - j]));
  } else {
    for (std::size_t j0 = 1; j0 < n; ++j0)
      for (std::size_t j1 = 1; j1 < n; ++j1)
        worst = std::max(worst,
                         std::abs(v[j0 * n + j1] - v[(n - j0) * n + (n - j1)]));
  }
  return worst;
}

double kernel_min(const KernelTable& k) {
  const auto& v = k.values.values();
  double m = 0.0;
  for (double x : v) m = std::min(m, x);
  return m;
}

std::vector<CheckResult> certify_kernel(const KernelTable& k, double mass_tol,
                                        double sym_tol, double neg_tol) {
  std::vector<CheckResult> out;
  out.push_back(check_leq("mass_defect", std::abs(kernel_mass(k) - 1.0), mass_tol));
  out.push_back(check_leq("symmetry_defect", kernel_symmetry_defect(k), sym_tol));
  out.push_back(check_leq("negativity", -kernel_min(k), neg_tol));
  return out;
}

double check_scaling(const KernelTable& k) {
  if (k.kind != Kind::fractional)
    throw InvalidArgument("scaling identity only holds for the fractional kernel");
  double lambda = std::pow(k.t, -1.0 / (2.0 * k.s));
  const UniformGrid& g = k.grid;
  UniformGrid ref_grid =
      make_grid(g.dim(), g.points_per_axis(), lambda * g.half_width());
  KernelTable ref = fractional_kernel(ref_grid, 1.0, k.s);
  double pref = std::pow(lambda, g.dim());
  double bulk = g.half_width() / 4.0;
  double worst = 0.0;
  const auto& a = k.values.values();
  const auto& b = ref.values.values();
  for_each_lattice_radius(g, [&](std::size_t idx, double r) {
    if (r > bulk) return;
    double lhs = a[idx];
    double rhs = pref * b[idx];
    double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / denom);
  });
  return worst;
}

double check_chapman_kolmogorov(const UniformGrid& grid, Kind kind, double s,
                                double t, double tau) {
  auto build = [&](double tt) {
    switch (kind) {
      case Kind::gaussian: return gaussian_kernel(grid, tt);
      case Kind::fractional: return fractional_kernel(grid, tt, s);
      case Kind::mixed: return mixed_kernel(grid, tt, s);
    }
    throw InvalidArgument("unknown kernel kind");
  };
  KernelTable a = build(t);
  KernelTable b = build(tau);
  KernelTable c = build(t + tau);
  Field composed = convolve(a.values, b.values);
  const auto& lhs = composed.values();
  const auto& rhs = c.values.values();
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  return worst;
}

Region classify_region(double t, double x_abs, double s) {
  if (t >= 1.0 || x_abs >= 1.0) return Region::late_or_far;
  double x2 = x_abs * x_abs;
  double x2s = std::pow(x_abs, 2.0 * s);
  if (x2 < t && t < x2s) return Region::diffusive_window;
  if (t < x2) return Region::short_time;
  return Region::local_window;  // x^(2s) <= t <= 1
}

BoundsReport check_two_sided_bounds(const KernelTable& k, double M,
                                    double ratio_tol) {
  if (k.kind == Kind::gaussian)
    throw InvalidArgument("two-sided bounds target the fractional and mixed kernels");
  BoundsReport rep;
  rep.spec.M = M;
  rep.spec.alpha = alpha_constant(k.grid.dim(), k.s);
  double dim = static_cast<double>(k.grid.dim());
  double tail_pow = dim + 2.0 * k.s;
  double scale = std::pow(k.t, 1.0 / (2.0 * k.s));
  double outer = 0.9 * k.grid.half_width();
  const auto& v = k.values.values();

  if (k.kind == Kind::fractional) {
    double pref = std::pow(k.t, -dim / (2.0 * k.s));
    double worst = 1.0;
    for_each_lattice_radius(k.grid, [&](std::size_t idx, double r) {
      if (r > outer) return;
      double q = pref / (1.0 + std::pow(r / scale, tail_pow));
      double p = v[idx];
      if (p <= 0.0 || q <= 0.0) return;
      worst = std::max({worst, p / q, q / p});
    });
    rep.fitted_B = worst;
    rep.spec.B = worst;
    rep.checks.push_back(
        make_check("envelope_B_finite", worst, 0.0,
                   std::isfinite(worst) && worst >= 1.0));
    return rep;
  }

  // Mixed kernel: tail-ratio window plus the four-region envelope.  The
  // constancy window caps at L/4: for a |x|^-(N+2s) tail the periodic
  // images contribute ~(x/(2L-x))^(N+2s), which is ~2% at L/4 but ~67% at
  // the outer-10% boundary -- enough to destroy the measured constancy.
  double lo = M * scale;
  outer = std::min(outer, 0.25 * k.grid.half_width());
  double rmin = 1e300, rmax = 0.0, rsum = 0.0;
  std::size_t count = 0;
  for_each_lattice_radius(k.grid, [&](std::size_t idx, double r) {
    if (r <= lo || r > outer) return;
    double rho = v[idx] * std::pow(r, tail_pow) / k.t;
    rmin = std::min(rmin, rho);
    rmax = std::max(rmax, rho);
    rsum += rho;
    ++count;
  });
  if (count == 0)
    throw InvalidArgument("tail window is empty; grid too small for M t^(1/2s)");
  double rmean = rsum / static_cast<double>(count);
  rep.tail_ratio_min = rmin;
  rep.tail_ratio_max = rmax;
  rep.coeff_vs_alpha = rmean / rep.spec.alpha;
  rep.coeff_vs_tail_const = rmean / (tail_constant(k.grid.dim(), k.s));
  rep.checks.push_back(
      check_leq("tail_ratio_spread", rmax / rmin, ratio_tol));

  KernelTable frac = fractional_kernel(k.grid, k.t, k.s);
  const auto& ps = frac.values.values();
  double gauss_pref = std::pow(4.0 * kPi * k.t, -dim / 2.0);
  double C = 1.0;
  for_each_lattice_radius(k.grid, [&](std::size_t idx, double r) {
    if (r > outer) return;
    double H = v[idx];
    if (H <= 0.0) return;
    double p_hat = gauss_pref * std::exp(-r * r / k.t);
    double p_tilde = gauss_pref * std::exp(-r * r / (16.0 * k.t));
    double p_two = gauss_pref * std::exp(-r * r / (4.0 * k.t));
    double q1 = 0.0, q2 = 0.0;
    switch (classify_region(k.t, r, k.s)) {
      case Region::diffusive_window: q1 = p_hat; q2 = p_tilde; break;
      case Region::short_time:
        q1 = std::max(p_hat, ps[idx]);
        q2 = std::max(p_tilde, ps[idx]);
        break;
      case Region::local_window: q1 = p_two; q2 = p_two; break;
      case Region::late_or_far: q1 = ps[idx]; q2 = ps[idx]; break;
    }
    if (q1 > 0.0) C = std::max(C, q1 / H);
    if (q2 > 0.0) C = std::max(C, H / q2);
  });
  rep.harnack_C = C;
  rep.checks.push_back(
      make_check("harnack_C_finite", C, 0.0, std::isfinite(C) && C >= 1.0));
  rep.spec.B = C;
  return rep;
}

double tail_slope(const KernelTable& k, double lo, double hi) {
  if (k.grid.dim() != 1)
    throw InvalidArgument("tail slope fit implemented for 1D tables");
  const auto& v = k.values.values();
  std::size_t n = k.grid.points_per_axis();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t j = n / 2; j < n; ++j) {
    double x = k.grid.coord(j);
    if (x < lo || x > hi || v[j] <= 0.0) continue;
    double lx = std::log(x), ly = std::log(v[j]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 5) throw InvalidArgument("tail window holds fewer than 5 lattice points");
  double denom = static_cast<double>(cnt) * sxx - sx * sx;
  return (static_cast<double>(cnt) * sxy - sx * sy) / denom;
}

double sup_decay_exponent(int dim, Kind kind, double s,
                          const std::vector<double>& times) {
  if (times.size() < 2)
    throw InvalidArgument("decay fit needs at least two times");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double t : times) {
    UniformGrid g = suggest_grid(dim, t, s, kind);
    KernelTable k = kind == Kind::gaussian ? gaussian_kernel(g, t)
                    : kind == Kind::fractional ? fractional_kernel(g, t, s)
                                               : mixed_kernel(g, t, s);
    double sup = 0.0;
    for (double v : k.values.values()) sup = std::max(sup, v);
    double lx = std::log(t), ly = std::log(sup);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  double m = static_cast<double>(times.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace fkpp::kernels
