#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fkpp/spaces.hpp"
#include "fkpp/symbol.hpp"

using namespace fkpp;
using namespace fkpp::spaces;

namespace {

constexpr double kPi = std::numbers::pi;

Field bump(const UniformGrid& g, double width = 4.0, double height = 1.0) {
  return field_from_function(g, [=](double x, double) {
    return height * std::exp(-x * x / (2.0 * width * width));
  });
}

double sup_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.values().size(); ++j)
    d = std::max(d, std::abs(a.values()[j] - b.values()[j]));
  return d;
}

Field subtract(const Field& a, const Field& b) {
  AlignedVector<double> v(a.values().size());
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = a.values()[j] - b.values()[j];
  return Field::from_values(a.grid(), std::move(v));
}

}  // namespace

TEST_CASE("weighted norm evaluates the polynomial weight exactly") {
  UniformGrid g = make_grid(1, 1 << 10, 100.0);

  Field ramp = field_from_function(g, [](double x, double) { return std::abs(x); });
  // sup |x|/(1+|x|) over the lattice is attained at the left edge x = -100.
  CHECK(xgamma_norm(ramp, 1.0) == doctest::Approx(100.0 / 101.0).epsilon(1e-15));

  // The weight is literally 1 + |x|^gamma, so gamma = 0 divides by the
  // constant 2: half the sup norm, same topology.
  Field one = field_from_function(g, [](double, double) { return 1.0; });
  CHECK(xgamma_norm(one, 0.0) == 0.5);
  CHECK(xgamma_norm(one, 2.0) == doctest::Approx(1.0).epsilon(1e-15));

  Field zero(g);
  CHECK(xgamma_norm(zero, 0.7) == 0.0);

  Field rough = field_from_function(
      g, [](double x, double) { return std::sin(0.3 * x) - 0.25 * std::cos(x); });
  CHECK(xgamma_norm(rough, 0.0) ==
        doctest::Approx(0.5 * sup_norm(rough)).epsilon(1e-15));

  CHECK_THROWS_AS(xgamma_norm(one, -0.5), InvalidArgument);

  CHECK(make_weighted_norm(0.8, 0.5).gamma == 0.8);
  CHECK_THROWS_WITH_AS(make_weighted_norm(1.2, 0.5),
                       doctest::Contains("gamma must be < 2s"), InvalidArgument);
  CHECK_THROWS_AS(make_weighted_norm(1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(make_weighted_norm(-0.1, 0.5), InvalidArgument);
  CHECK_THROWS_AS(make_weighted_norm(0.5, 1.5), InvalidArgument);
}

TEST_CASE("barrier profile is plateaued, continuous, and power-law tailed") {
  PowerLawBarrier b = make_barrier(1.0, 1.0, 0.5);
  CHECK(barrier_plateau(b, 1) == 1.0);
  // a0 r0^-(N+2s) with a0 = 0.5, r0 = 2, N + 2s = 1.5.
  PowerLawBarrier b2 = make_barrier(0.5, 2.0, 0.25);
  CHECK(barrier_plateau(b2, 1) ==
        doctest::Approx(0.5 * std::pow(2.0, -1.5)).epsilon(1e-15));

  UniformGrid g = make_grid(1, 1 << 12, 64.0);
  Field v = barrier_field(g, b);
  CHECK(sup_norm(v) == barrier_plateau(b, 1));
  std::size_t j8 = static_cast<std::size_t>((8.0 + 64.0) / g.dx());
  CHECK(v.values()[j8] == doctest::Approx(std::pow(8.0, -2.0)).epsilon(1e-14));
  // Continuity at the seam: the two branches meet at |x| = r0.
  for (std::size_t j = 1; j < g.size(); ++j)
    CHECK(std::abs(v.values()[j] - v.values()[j - 1]) <= barrier_plateau(b, 1));

  CHECK_THROWS_AS(make_barrier(0.0, 1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(make_barrier(1.0, 0.5, 0.5), InvalidArgument);
  CHECK_THROWS_AS(make_barrier(1.0, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_barrier(1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("the two propagation routes agree") {
  UniformGrid g = make_grid(1, 1 << 12, 64.0);
  Field u = bump(g);
  for (SymbolSpec spec : {make_symbol(0.5, true, true),
                          make_symbol(0.75, false, true),
                          make_symbol(0.5, true, false)}) {
    Field via_mult = propagate(u, spec, 1.0, PropagateRoute::multiplier);
    Field via_conv = propagate(u, spec, 1.0, PropagateRoute::convolution);
    CHECK(sup_diff(via_mult, via_conv) <= 1e-10);
  }

  UniformGrid g2 = make_grid(2, 64, 16.0);
  Field u2 = field_from_function(g2, [](double x, double y) {
    return std::exp(-(x * x + y * y) / 8.0);
  });
  SymbolSpec spec = make_symbol(0.5, true, true);
  CHECK(sup_diff(propagate(u2, spec, 0.5, PropagateRoute::multiplier),
                 propagate(u2, spec, 0.5, PropagateRoute::convolution)) <= 1e-10);
}

TEST_CASE("the semigroup fixes constants and is the identity at time zero") {
  UniformGrid g = make_grid(1, 1 << 12, 64.0);
  SymbolSpec spec = make_symbol(0.5, true, true);

  Field one = field_from_function(g, [](double, double) { return 1.0; });
  CHECK(sup_diff(propagate(one, spec, 1.0), one) <= 1e-13);
  CHECK(sup_diff(propagate(one, spec, 16.0), one) <= 1e-13);

  Field u = bump(g);
  Field frozen = propagate(u, spec, 0.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    CHECK(frozen.values()[j] == u.values()[j]);
}

TEST_CASE("propagation is positive, order preserving, and sup contracting") {
  UniformGrid g = make_grid(1, 1 << 12, 64.0);
  SymbolSpec spec = make_symbol(0.5, true, true);

  Field ind = field_from_function(
      g, [](double x, double) { return std::abs(x) <= 4.0 ? 1.0 : 0.0; });
  for (double t : {0.1, 1.0, 10.0}) {
    Field v = propagate(ind, spec, t);
    double lo = 0.0;
    for (double x : v.values()) lo = std::min(lo, x);
    CHECK(lo >= -1e-12);
    CHECK(sup_norm(v) <= sup_norm(ind) * (1.0 + 1e-12));
  }

  Field low = bump(g, 4.0, 0.3);
  Field high = bump(g, 4.0, 0.6);
  Field tl = propagate(low, spec, 1.0);
  Field th = propagate(high, spec, 1.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    CHECK(tl.values()[j] <= th.values()[j] + 1e-12);
}

TEST_CASE("strong continuity at time zero in the weighted norm") {
  UniformGrid g = make_grid(1, 1 << 13, 256.0);
  SymbolSpec spec = make_symbol(0.5, true, true);
  Field u = bump(g);

  // For a smooth bump ||T_t u - u|| ~ t ||L u||, so each decade in t should
  // shed close to a decade of defect.
  std::vector<double> defect;
  for (double t : {1e-1, 1e-2, 1e-3})
    defect.push_back(xgamma_norm(subtract(propagate(u, spec, t), u), 0.8));
  CHECK(defect[1] <= 0.2 * defect[0]);
  CHECK(defect[2] <= 0.2 * defect[1]);
  CHECK(defect[2] <= 1e-3);
}

TEST_CASE("operator-norm growth envelopes hold and are grid stable") {
  SymbolSpec spec = make_symbol(0.5, true, true);
  std::vector<double> times{1.0, 4.0, 16.0};

  UniformGrid g = make_grid(1, 1 << 12, 64.0);
  GrowthReport flat = check_semigroup_growth(g, spec, 0.0, times);
  CHECK(all_pass(flat.checks));
  for (double c : flat.fitted_C) CHECK(c <= 1.0 + 1e-10);

  GrowthReport weighted = check_semigroup_growth(g, spec, 0.8, times);
  CHECK(all_pass(weighted.checks));
  CHECK(weighted.stability_ratio <= 2.0);

  UniformGrid g_fine = make_grid(1, 1 << 13, 64.0);
  GrowthReport refined = check_semigroup_growth(g_fine, spec, 0.8, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double ratio = refined.fitted_C[i] / weighted.fitted_C[i];
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 2.0);
  }

  CHECK_THROWS_AS(check_semigroup_growth(g, spec, 0.8, {1.0, -2.0}),
                  InvalidArgument);
}

TEST_CASE("the barrier pushes forward with two-sided power-law control") {
  UniformGrid g = make_grid(1, 1 << 16, 2048.0);
  SymbolSpec spec = make_symbol(0.5, true, true);
  PowerLawBarrier b = make_barrier(1.0, 1.0, 0.5);

  BarrierPushReport rep = push_powerlaw_barrier(g, spec, b, 1.0);
  CHECK(all_pass(rep.checks));
  CHECK(rep.fitted_lower > 0.0);
  CHECK(rep.fitted_upper >= rep.fitted_lower);
  CHECK(rep.plateau_sup > 0.0);
  CHECK(rep.plateau_sup <= barrier_plateau(b, 1) * (1.0 + 1e-12));

  // Doubling the time moves the fitted envelope constants only mildly.
  BarrierPushReport rep2 = push_powerlaw_barrier(g, spec, b, 2.0);
  CHECK(all_pass(rep2.checks));
  CHECK(rep2.fitted_lower / rep.fitted_lower >= 0.25);
  CHECK(rep2.fitted_upper / rep.fitted_upper <= 4.0);

  CHECK_THROWS_AS(push_powerlaw_barrier(g, spec, b, 0.5), InvalidArgument);
}

TEST_CASE("the polynomial weight pushes forward with the expected envelope") {
  UniformGrid g = make_grid(1, 1 << 16, 2048.0);
  SymbolSpec spec = make_symbol(0.5, true, true);

  WeightPushReport rep = push_polynomial_weight(g, spec, 0.8, 1.0);
  CHECK(all_pass(rep.checks));
  CHECK(rep.fitted_lower > 0.0);
  CHECK(rep.fitted_upper >= rep.fitted_lower);

  WeightPushReport rep2 = push_polynomial_weight(g, spec, 0.8, 2.0);
  CHECK(all_pass(rep2.checks));
  CHECK(rep2.fitted_upper / rep.fitted_upper <= 4.0);

  // gamma = 0 degenerates to exact conservation of the constant 1.
  WeightPushReport flat = push_polynomial_weight(g, spec, 0.0, 1.0);
  CHECK(all_pass(flat.checks));

  CHECK_THROWS_AS(push_polynomial_weight(g, spec, 0.8, 0.25), InvalidArgument);
}

TEST_CASE("the generator is diagonal on eigenmodes and kills constants") {
  // On [-pi, pi) the mode cos(x) has frequency 1, where every admissible
  // symbol takes the value 1^2 + 1^(2s) = 2.
  UniformGrid g = make_grid(1, 256, kPi);
  Field u = field_from_function(g, [](double x, double) { return std::cos(x); });
  for (double s : {0.25, 0.5, 0.75}) {
    Field lu = apply_generator(u, make_symbol(s, true, true));
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      worst = std::max(worst, std::abs(lu.values()[j] - 2.0 * u.values()[j]));
    CHECK(worst <= 1e-11);
  }

  Field one = field_from_function(g, [](double, double) { return 1.0; });
  Field lone = apply_generator(one, make_symbol(0.5, true, true));
  CHECK(sup_norm(lone) <= 1e-14);
}

TEST_CASE("band-limited probes see a nonnegative generator at their maxima") {
  UniformGrid g = make_grid(1, 1 << 12, 64.0);
  SymbolSpec spec = make_symbol(0.5, true, true);
  MaxPrincipleReport rep = check_discrete_max_principle(g, spec, 100);
  CHECK(rep.probes == 100);
  CHECK(all_pass(rep.checks));
  CHECK(rep.worst_defect <= 1e-8);
}
