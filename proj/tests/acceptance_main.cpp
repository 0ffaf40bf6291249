// Release gate: sixteen end-to-end criteria, one verdict line each, exit 0
// only when every line passes.  Tolerances are pinned inline next to the
// measurements they gate; nothing here is tuned at runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fkpp/config.hpp"
#include "fkpp/dynamics.hpp"
#include "fkpp/fronts.hpp"
#include "fkpp/io.hpp"
#include "fkpp/kernels.hpp"
#include "fkpp/oracle.hpp"
#include "fkpp/spaces.hpp"

using namespace fkpp;
using dynamics::ReactionForm;
using dynamics::ReactionKPP;
using dynamics::Scheme;
using dynamics::SolverConfig;
using kernels::KernelTable;
using kernels::Kind;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t index_of(const UniformGrid& g, double x) {
  return static_cast<std::size_t>(std::llround((x + g.half_width()) / g.dx()));
}

KernelTable build_kernel(Kind kind, const UniformGrid& g, double t, double s) {
  switch (kind) {
    case Kind::gaussian:
      return kernels::gaussian_kernel(g, t);
    case Kind::fractional:
      return kernels::fractional_kernel(g, t, s);
    default:
      return kernels::mixed_kernel(g, t, s);
  }
}

// Shared state: the full-scale mixed spreading run feeds three criteria.
std::optional<fronts::FrontTrace> g_mixed_trace;
double g_mixed_sigma = 0.0;

// --- 1: spectral kernel vs the closed-form Cauchy density ------------------

Outcome c01_kernel_closed_form() {
  const double L = 512.0;
  UniformGrid g = make_grid(1, std::size_t(1) << 16, L);
  double worst = 0.0, slowest = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    Clock::time_point t0 = Clock::now();
    KernelTable k = kernels::fractional_kernel(g, t, 0.5);
    // The lattice realizes the periodization of t/(pi(t^2+x^2)), whose image
    // sum telescopes to (1/2L) sinh(a)/(cosh a - cos b) with a = pi t/L and
    // b = pi x/L; the half-angle denominator keeps the seam stable.  The
    // free-space form itself sits (pi t/L)^2/12 above the periodized value
    // at the origin -- 3e-6 at t = 1 -- so the reference must wrap.
    double a = std::numbers::pi * t / L;
    double sh = std::sinh(0.5 * a);
    double top = std::sinh(a) / (4.0 * L);
    for (std::size_t j = 0; j < g.size(); ++j) {
      double x = g.coord(j);
      if (std::abs(x) > L / 4.0) continue;
      double sn = std::sin(0.5 * std::numbers::pi * x / L);
      double ref = top / (sh * sh + sn * sn);
      worst = std::max(worst, std::abs(k.at(j) - ref) / ref);
    }
    slowest = std::max(slowest, seconds_since(t0));
  }
  bool pass = worst <= 1e-6 && slowest < 2.0;
  return {pass, fmt("max rel %.2e (tol 1e-06) on |x| <= 128; slowest t %.3f s "
                    "(cap 2 s)",
                    worst, slowest)};
}

// --- 2: mass, symmetry, positivity over the kind/s/t matrix ----------------

Outcome c02_kernel_certificates() {
  double worst_mass = 0.0, worst_sym = 0.0, worst_min = 0.0;
  for (Kind kind : {Kind::gaussian, Kind::fractional, Kind::mixed}) {
    for (double s : {0.25, 0.5, 0.75}) {
      for (double t : {0.1, 1.0, 10.0}) {
        UniformGrid g = kernels::suggest_grid(1, t, s, kind);
        KernelTable k = build_kernel(kind, g, t, s);
        worst_mass = std::max(worst_mass, std::abs(kernels::kernel_mass(k) - 1.0));
        worst_sym = std::max(worst_sym, kernels::kernel_symmetry_defect(k));
        worst_min = std::min(worst_min, kernels::kernel_min(k));
      }
    }
  }
  bool pass = worst_mass <= 1e-8 && worst_sym <= 1e-12 && worst_min >= -1e-12;
  return {pass, fmt("27 tables: |mass-1| %.2e (tol 1e-08), symmetry %.2e "
                    "(tol 1e-12), min %.2e (floor -1e-12)",
                    worst_mass, worst_sym, worst_min)};
}

// --- 3: semigroup composition at the table level ---------------------------

Outcome c03_chapman_kolmogorov() {
  double worst = 0.0;
  for (Kind kind : {Kind::gaussian, Kind::fractional, Kind::mixed}) {
    UniformGrid g = kernels::suggest_grid(1, 0.5, 0.5, kind);
    worst = std::max(worst, kernels::check_chapman_kolmogorov(g, kind, 0.5, 1.0, 1.0));
    worst = std::max(worst, kernels::check_chapman_kolmogorov(g, kind, 0.5, 0.5, 1.5));
  }
  return {worst <= 1e-7,
          fmt("sup defect %.2e (tol 1e-07) over (t,tau) in {(1,1),(0.5,1.5)} x "
              "3 kinds",
              worst)};
}

// --- 4: mixed kernel equals gaussian (*) fractional ------------------------

Outcome c04_factorization() {
  UniformGrid g = make_grid(1, std::size_t(1) << 13, 64.0);
  KernelTable direct = kernels::mixed_kernel(g, 1.0, 0.5, kernels::Construction::spectral);
  KernelTable conv = kernels::mixed_kernel(g, 1.0, 0.5, kernels::Construction::convolution);
  double sup = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    sup = std::max(sup, std::abs(direct.at(j) - conv.at(j)));
  return {sup <= 1e-8, fmt("sup |spectral - convolution| %.2e (tol 1e-08) at "
                           "t = 1, s = 0.5",
                           sup)};
}

// --- 5: heavy-tail slope and coefficient -----------------------------------

Outcome c05_tail_law() {
  UniformGrid g = make_grid(1, std::size_t(1) << 16, 4096.0);
  KernelTable k = kernels::mixed_kernel(g, 2.0, 0.5);
  double slope = kernels::tail_slope(k, 50.0, 400.0);
  double worst_dev = 0.0;
  for (double x : {64.0, 128.0, 256.0}) {
    double ref = kernels::kernel_by_quadrature(1, 2.0, x, 0.5, Kind::mixed);
    worst_dev = std::max(worst_dev,
                         std::abs(k.at(index_of(g, x)) - ref) / ref);
  }
  // The two candidate normalizations of the tail constant disagree with each
  // other; their ratios are recorded for the report, not asserted.
  kernels::BoundsReport rep = kernels::check_two_sided_bounds(k);
  bool pass = std::abs(slope - (-2.0)) <= 0.02 * 2.0 && worst_dev <= 0.05;
  return {pass, fmt("slope %.4f (want -2 +/- 2%%), oracle dev %.2e (tol 0.05); "
                    "recorded rho/alpha = %.3f, rho/C = %.3f",
                    slope, worst_dev, rep.coeff_vs_alpha, rep.coeff_vs_tail_const)};
}

// --- 6: multiplier exactness on eigenmodes ---------------------------------

Outcome c06_eigenmode_decay() {
  UniformGrid g = make_grid(1, 256, std::numbers::pi);
  SymbolSpec spec = make_symbol(0.5, true, true);
  double worst = 0.0;
  for (int k : {1, 2, 3}) {
    for (double t : {0.5, 1.0}) {
      double m = k * k + std::pow(static_cast<double>(k), 1.0);
      if (t * m > 8.0) continue;  // keep the mode far above rounding
      Field u = field_from_function(
          g, [k](double x, double) { return std::cos(k * x); });
      Field v = spaces::propagate(u, spec, t);
      double fac = std::exp(-t * m);
      for (std::size_t j = 0; j < g.size(); ++j) {
        double ref = fac * std::cos(k * g.coord(j));
        worst = std::max(worst, std::abs(v.values()[j] - ref) / fac);
      }
    }
  }
  return {worst <= 1e-12,
          fmt("worst rel %.2e (tol 1e-12) over k in {1,2,3}, decay e^{-t(k^2 + "
              "k^{2s})}",
              worst)};
}

// --- 7: scalar logistic oracle ---------------------------------------------

Outcome c07_logistic_oracle() {
  UniformGrid g = make_grid(1, 64, 32.0);
  SymbolSpec spec = make_symbol(0.5, true, true);
  ReactionKPP f(ReactionForm::logistic, 1.0);
  Field u0 = field_from_function(g, [](double, double) { return 0.2; });
  double exact = 0.2 * std::exp(5.0) / (0.8 + 0.2 * std::exp(5.0));

  auto endpoint_error = [&](Scheme scheme, double dt) {
    SolverConfig cfg;
    cfg.scheme = scheme;
    cfg.dt = dt;
    cfg.t_end = 5.0;
    cfg.snapshot_stride = std::size_t(1) << 30;  // endpoints only
    dynamics::Trajectory traj = dynamics::solve(g, spec, f, u0, cfg);
    double worst = 0.0;
    for (double v : traj.snapshots.back().values())
      worst = std::max(worst, std::abs(v - exact) / exact);
    return worst;
  };

  double euler = endpoint_error(Scheme::exponential_euler, 1e-3);
  double picard = endpoint_error(Scheme::picard_duhamel, 0.1);
  // The production stepper is first order by construction: on constant data
  // it reduces to the explicit Euler map, whose logistic endpoint error is
  // (dt/2) u'(5) ln(u'(5)/u'(0)) = 2.34e-5 at dt = 1e-3.  That floor is a
  // property of the scheme, not the implementation, and it exceeds the 1e-5
  // bar; the bar stays as stated and the miss is reported honestly.
  bool pass = euler <= 1e-5 && picard <= 1e-6;
  return {pass, fmt("euler rel %.2e (tol 1e-05, first-order floor 2.3e-05); "
                    "picard rel %.2e (tol 1e-06)",
                    euler, picard)};
}

// --- 8: comparison principle and range preservation ------------------------

Outcome c08_comparison() {
  UniformGrid g = make_grid(1, std::size_t(1) << 12, 64.0);
  SymbolSpec spec = make_symbol(0.5, true, true);
  ReactionKPP f;
  Field lo = field_from_function(
      g, [](double x, double) { return std::abs(x) <= 4.0 ? 0.3 : 0.0; });
  Field hi = field_from_function(
      g, [](double x, double) { return std::abs(x) <= 4.0 ? 0.6 : 0.0; });
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 10.0;
  dynamics::ComparisonReport rep = dynamics::check_comparison(g, spec, f, lo, hi, cfg);
  bool pass = rep.max_order_violation <= 1e-10 && rep.range_defect <= 1e-10;
  return {pass, fmt("order violation %.2e, range defect %.2e (tol 1e-10 each) "
                    "to t = 10",
                    rep.max_order_violation, rep.range_defect)};
}

// --- 9: fixed-point sweep budget at the window edge ------------------------

Outcome c09_picard_budget() {
  UniformGrid g = make_grid(1, std::size_t(1) << 10, 32.0);
  SymbolSpec spec = make_symbol(0.5, true, true);
  ReactionKPP f;  // logistic r = 1 => window dt <= 1/(4 f'(0)) = 0.25
  dynamics::PicardStepper stepper(g, spec, f, 0.25, 1e-10, 64);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    AlignedVector<double> u(g.size());
    for (double& v : u) v = unif(rng);
    worst = std::max(worst, stepper.step(u));
  }
  return {worst <= 25, fmt("worst sweep count %zu (budget 25) at dt = 0.25, "
                           "tol 1e-10, 20 random fields",
                           worst)};
}

// --- 10: mixed-regime spreading rate ---------------------------------------

Outcome c10_mixed_spreading() {
  fronts::RegimeSetup setup = fronts::default_regime_setup(0.5, 1.0, 16.0, 3);
  Clock::time_point t0 = Clock::now();
  fronts::SpreadRun run =
      fronts::run_spread_leg(setup.legs[2], setup.reaction, {0.5});
  double secs = seconds_since(t0);
  fronts::RateFit fit =
      fronts::fit_rate(run.traces[0], fronts::RateModel::exponential, 8.0, 16.0);
  g_mixed_trace = run.traces[0];
  g_mixed_sigma = fit.estimate;
  bool pass = std::abs(fit.estimate - 0.5) <= 0.15 * 0.5 && secs < 60.0;
  return {pass, fmt("sigma %.4f (want 0.5 +/- 15%%), r2 %.4f, n = 2^21 in "
                    "%.1f s (cap 60 s)",
                    fit.estimate, fit.r_squared, secs)};
}

// --- 11: classical control leg ---------------------------------------------

Outcome c11_classical_control() {
  fronts::RegimeSetup setup = fronts::default_regime_setup(0.5, 1.0, 16.0, 3);
  fronts::SpreadRun run =
      fronts::run_spread_leg(setup.legs[0], setup.reaction, {0.5});
  fronts::RateFit lin =
      fronts::fit_rate(run.traces[0], fronts::RateModel::linear, 8.0, 16.0);
  fronts::ModelSelection sel =
      fronts::select_model(run.traces[0], setup.full_window_start, 16.0);
  bool pass = std::abs(lin.estimate - 2.0) <= 0.10 * 2.0 &&
              sel.preferred == fronts::RateModel::linear && sel.delta_r2 >= 0.05;
  return {pass, fmt("c %.4f (want 2 +/- 10%%); linear preferred with delta r2 "
                    "%.3f (need >= 0.05)",
                    lin.estimate, sel.delta_r2)};
}

// --- 12: fractional vs mixed rate agreement --------------------------------

Outcome c12_fractional_agreement() {
  if (!g_mixed_trace)
    return {false, "mixed spreading run unavailable (criterion 10 aborted)"};
  fronts::RegimeSetup setup = fronts::default_regime_setup(0.5, 1.0, 16.0, 3);
  fronts::SpreadRun run =
      fronts::run_spread_leg(setup.legs[1], setup.reaction, {0.5});
  fronts::RateFit fit =
      fronts::fit_rate(run.traces[0], fronts::RateModel::exponential, 8.0, 16.0);
  double rel = std::abs(fit.estimate - g_mixed_sigma) / g_mixed_sigma;
  return {rel <= 0.10, fmt("fractional sigma %.4f vs mixed %.4f: disagree "
                           "%.1f%% (cap 10%%)",
                           fit.estimate, g_mixed_sigma, 100.0 * rel)};
}

// --- 13: acceleration plus no stationary profile ---------------------------

Outcome c13_no_traveling_wave() {
  if (!g_mixed_trace)
    return {false, "mixed spreading run unavailable (criterion 10 aborted)"};
  double ratio = fronts::moving_frame_speed_ratio(*g_mixed_trace, 8.0, 16.0);

  UniformGrid g = make_grid(1, 8192, 64.0);
  SymbolSpec spec = make_symbol(0.5, true, true);
  ReactionKPP f;
  std::vector<double> speeds;
  for (int i = 0; i <= 100; ++i) speeds.push_back(0.1 * i);
  fronts::WaveSweepReport sweep =
      fronts::traveling_wave_sweep(g, spec, f, {0.5, 1.0, 2.0}, speeds);

  Field one = field_from_function(g, [](double, double) { return 1.0; });
  double eq_worst = 0.0;
  for (double c : {0.0, 2.0}) {
    eq_worst = std::max(eq_worst,
                        fronts::traveling_wave_residual(Field(g), spec, f, c));
    eq_worst = std::max(eq_worst,
                        fronts::traveling_wave_residual(one, spec, f, c));
  }
  bool pass = ratio >= 5.0 && sweep.min_residual >= 1e-2 && eq_worst <= 1e-10;
  return {pass, fmt("speed ratio R'(16)/R'(8) %.1f (need >= 5); sweep min "
                    "residual %.3f (floor 1e-2); equilibria %.1e (tol 1e-10)",
                    ratio, sweep.min_residual, eq_worst)};
}

// --- 14: expanding-plateau barrier iteration -------------------------------

Outcome c14_barrier_iteration() {
  UniformGrid g = make_grid(1, std::size_t(1) << 17, 4096.0);
  SymbolSpec spec = make_symbol(0.5, true, true);
  ReactionKPP f;
  spaces::PowerLawBarrier barrier = spaces::make_barrier(0.1, 1.0, 0.5);
  SolverConfig cfg;
  cfg.dt = 0.02;
  dynamics::BarrierIterationReport rep =
      dynamics::run_barrier_iteration(g, spec, f, barrier, 0.35, 2.0, 5, cfg);
  double margin = 1e300;
  for (const auto& row : rep.rows)
    margin = std::min(margin, row.min_on_ball / rep.eps);
  bool pass = rep.all_hold && rep.rows.size() == 6;
  return {pass, fmt("u >= eps = %.3g on |x| <= e^{0.7k} for k = 0..5: %s "
                    "(worst margin %.2fx)",
                    rep.eps, rep.all_hold ? "all hold" : "violated", margin)};
}

// --- 15: weighted-envelope constants are stable ----------------------------

Outcome c15_envelope_stability() {
  SymbolSpec spec = make_symbol(0.5, true, true);
  const std::vector<double> times = {1.0, 4.0, 16.0};

  auto spread = [](const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    bool sane = lo > 0.0 && std::isfinite(hi);
    return sane ? hi / lo : 1e300;
  };

  std::vector<double> growth, barrier_lo, barrier_hi, weight_lo, weight_hi;
  for (std::size_t n : {std::size_t(1) << 15, std::size_t(1) << 16}) {
    UniformGrid g = make_grid(1, n, 512.0);
    spaces::GrowthReport rep = spaces::check_semigroup_growth(g, spec, 0.8, times);
    growth.insert(growth.end(), rep.fitted_C.begin(), rep.fitted_C.end());
  }
  spaces::PowerLawBarrier b = spaces::make_barrier(1.0, 1.0, 0.5);
  for (std::size_t n : {std::size_t(1) << 16, std::size_t(1) << 17}) {
    UniformGrid g = make_grid(1, n, 2048.0);
    for (double t : times) {
      spaces::BarrierPushReport br = spaces::push_powerlaw_barrier(g, spec, b, t);
      barrier_lo.push_back(br.fitted_lower);
      barrier_hi.push_back(br.fitted_upper);
      spaces::WeightPushReport wr = spaces::push_polynomial_weight(g, spec, 0.8, t);
      weight_lo.push_back(wr.fitted_lower);
      weight_hi.push_back(wr.fitted_upper);
    }
  }
  double worst = std::max({spread(growth), spread(barrier_lo), spread(barrier_hi),
                           spread(weight_lo), spread(weight_hi)});
  return {worst <= 2.0, fmt("constants across t in {1,4,16} and n -> 2n: "
                            "growth %.2fx, barrier %.2fx/%.2fx, weight "
                            "%.2fx/%.2fx (cap 2x)",
                            spread(growth), spread(barrier_lo), spread(barrier_hi),
                            spread(weight_lo), spread(weight_hi))};
}

// --- 16: CLI byte determinism ----------------------------------------------

Outcome c16_determinism() {
#ifndef FKPP_BIN_PATH
  return {false, "CLI path not compiled in"};
#else
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "fkpp_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  fs::path cfg_path = base / "run.ini";
  {
    std::ofstream cfg(cfg_path);
    cfg << "[grid]\nn = 4096\nhalf_width = 256\n"
        << "[solver]\ndt = 0.01\nt_end = 1\nsnapshot_stride = 50\n"
        << "[experiment]\nu0_amplitude = 0.8\nu0_width = 4\n";
  }
  for (const char* run : {"a", "b"}) {
    std::string cmd = std::string("\"") + FKPP_BIN_PATH + "\" evolve --config \"" +
                      cfg_path.string() + "\" --out-dir \"" +
                      (base / run).string() + "\" --quiet";
    if (std::system(cmd.c_str()) != 0)
      return {false, fmt("CLI run '%s' exited nonzero", run)};
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(base / "a"))
    if (entry.path().extension() == ".csv")
      names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  if (names.size() < 2) return {false, "expected several CSV outputs"};
  std::size_t matched = 0;
  for (const std::string& name : names) {
    if (io::sha256_file((base / "a" / name).string()) !=
        io::sha256_file((base / "b" / name).string()))
      return {false, fmt("%s differs between identical runs", name.c_str())};
    ++matched;
  }
  return {true, fmt("%zu CSVs byte-identical across two runs (SHA-256)", matched)};
#endif
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {1, "fractional kernel closed form", c01_kernel_closed_form},
      {2, "kernel mass/symmetry/positivity", c02_kernel_certificates},
      {3, "Chapman-Kolmogorov composition", c03_chapman_kolmogorov},
      {4, "mixed-kernel factorization", c04_factorization},
      {5, "heavy-tail slope and coefficient", c05_tail_law},
      {6, "eigenmode decay exactness", c06_eigenmode_decay},
      {7, "scalar logistic oracle", c07_logistic_oracle},
      {8, "comparison principle and range", c08_comparison},
      {9, "fixed-point sweep budget", c09_picard_budget},
      {10, "mixed spreading rate", c10_mixed_spreading},
      {11, "classical linear control", c11_classical_control},
      {12, "fractional vs mixed agreement", c12_fractional_agreement},
      {13, "no-traveling-wave evidence", c13_no_traveling_wave},
      {14, "expanding-plateau barrier", c14_barrier_iteration},
      {15, "weighted-envelope stability", c15_envelope_stability},
      {16, "CLI byte determinism", c16_determinism},
  };

  int passed = 0;
  std::vector<int> failed;
  for (const Entry& e : entries) {
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("aborted: ") + ex.what()};
    }
    std::printf("[%s] %02d %-33s %s\n", o.pass ? "PASS" : "FAIL", e.id,
                e.title, o.detail.c_str());
    std::fflush(stdout);
    if (o.pass)
      ++passed;
    else
      failed.push_back(e.id);
  }

  std::printf("acceptance: %d/16 criteria passed", passed);
  if (!failed.empty()) {
    std::printf(" (failed:");
    for (int id : failed) std::printf(" %d", id);
    std::printf(")");
  }
  std::printf("\n");
  return failed.empty() ? 0 : 1;
}
