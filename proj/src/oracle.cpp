#include "fkpp/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace fkpp::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

/// Cutoff with e^{-t m(Xi)} small enough that the tail integral is < 1e-12
/// even after the slowly varying prefactors.
double oracle_cutoff(const SymbolSpec& sym, double t) {
  double hi = 1.0;
  while (t * sym(hi) < 45.0) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (t * sym(mid) < 45.0 ? lo : hi) = mid;
  }
  return 1.5 * hi;
}

template <class F>
double integrate_panels(F&& f, double cutoff, double half_period) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  std::size_t panels = 1;
  if (half_period > 0.0 && half_period < cutoff) {
    panels = static_cast<std::size_t>(std::ceil(cutoff / half_period));
    panels = std::min<std::size_t>(panels, 400000);
  }
  double width = cutoff / static_cast<double>(panels);
  // Compensated panel sum: alternating panels cancel heavily for large x.
  double acc = 0.0, comp = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    double a = width * static_cast<double>(p);
    double b = (p + 1 == panels) ? cutoff : a + width;
    double piece = GK::integrate(f, a, b, 8, 1e-13);
    double y = piece - comp;
    double t2 = acc + y;
    comp = (t2 - acc) - y;
    acc = t2;
  }
  return acc;
}

}  // namespace

double kernel_by_quadrature(int dim, double t, double x_abs, double s,
                            Kind kind) {
  if (!(t > 0.0)) throw InvalidArgument("oracle time must be positive");
  if (x_abs < 0.0) throw InvalidArgument("oracle evaluation point must be |x|");
  SymbolSpec sym = kind_symbol(kind, s);
  double cutoff = oracle_cutoff(sym, t);
  if (dim == 1) {
    auto f = [&](double xi) { return std::cos(x_abs * xi) * std::exp(-t * sym(xi)); };
    double half_period = x_abs > 0.0 ? kPi / x_abs : 0.0;
    return integrate_panels(f, cutoff, half_period) / kPi;
  }
  if (dim == 2) {
    auto f = [&](double r) {
      return std::cyl_bessel_j(0.0, x_abs * r) * std::exp(-t * sym(r)) * r;
    };
    // J0 oscillates with asymptotic period 2 pi / x.
    double half_period = x_abs > 0.0 ? kPi / x_abs : 0.0;
    return integrate_panels(f, cutoff, half_period) / (2.0 * kPi);
  }
  throw InvalidArgument("quadrature oracle supports dim 1 or 2");
}

}  // namespace fkpp::kernels
