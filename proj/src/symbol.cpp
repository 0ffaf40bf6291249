#include "fkpp/symbol.hpp"

#include <cmath>
#include <complex>

#include "fft_engine.hpp"

namespace fkpp {

namespace {

/// Visits every spectral bin of the r2c layout: fn(flat_index, |xi|, parity)
/// where parity is (-1)^(k0+k1) for the centered-convolution phase.
template <class Fn>
void for_each_bin(const UniformGrid& g, Fn&& fn) {
  std::size_t n = g.points_per_axis();
  std::size_t half = n / 2 + 1;
  double dxi = g.dxi();
  if (g.dim() == 1) {
    for (std::size_t k = 0; k < half; ++k) {
      double xi = dxi * static_cast<double>(k);
      fn(k, xi, (k % 2 == 0) ? 1.0 : -1.0);
    }
  } else {
    for (std::size_t j0 = 0; j0 < n; ++j0) {
      long long k0 = g.freq_index(j0);
      double xi0 = dxi * static_cast<double>(k0);
      for (std::size_t j1 = 0; j1 < half; ++j1) {
        double xi1 = dxi * static_cast<double>(j1);
        double xi = std::hypot(xi0, xi1);
        double parity = ((j0 + j1) % 2 == 0) ? 1.0 : -1.0;
        fn(j0 * half + j1, xi, parity);
      }
    }
  }
}

Field multiply_spectrum(const Field& f, const auto& mult_fn) {
  bool was_physical = f.space() == Space::physical;
  Field spec = to_frequency(f);
  for_each_bin(spec.grid(), [&](std::size_t idx, double xi, double) {
    spec.spectrum()[idx] *= mult_fn(xi);
  });
  return was_physical ? to_physical(spec) : spec;
}

}  // namespace

double SymbolSpec::operator()(double xi_abs) const {
  double m = 0.0;
  if (include_local) m += xi_abs * xi_abs;
  if (include_fractional) m += std::pow(xi_abs, 2.0 * s);
  return m;
}

SymbolSpec make_symbol(double s, bool include_local, bool include_fractional) {
  if (!(s > 0.0 && s < 1.0))
    throw InvalidArgument("symbol order s must lie in (0, 1)");
  if (!include_local && !include_fractional)
    throw InvalidArgument("symbol must include at least one operator part");
  return SymbolSpec{s, include_local, include_fractional};
}

Field apply_multiplier(const Field& f, const SymbolSpec& spec, double t) {
  if (t < 0.0) throw InvalidArgument("multiplier time must be >= 0");
  if (t == 0.0) return f;
  return multiply_spectrum(f, [&](double xi) { return std::exp(-t * spec(xi)); });
}

Field apply_generator(const Field& f, const SymbolSpec& spec) {
  return multiply_spectrum(f, [&](double xi) { return spec(xi); });
}

Field apply_derivative(const Field& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim())
    throw InvalidArgument("derivative axis out of range");
  bool was_physical = f.space() == Space::physical;
  Field spec = to_frequency(f);
  const UniformGrid& g = spec.grid();
  std::size_t n = g.points_per_axis();
  std::size_t half = n / 2 + 1;
  double dxi = g.dxi();
  auto& coeffs = spec.spectrum();
  if (g.dim() == 1) {
    for (std::size_t k = 0; k < half; ++k) {
      double xi = (k == n / 2) ? 0.0 : dxi * static_cast<double>(k);
      coeffs[k] *= std::complex<double>(0.0, xi);
    }
  } else {
    for (std::size_t j0 = 0; j0 < n; ++j0) {
      long long k0 = g.freq_index(j0);
      for (std::size_t j1 = 0; j1 < half; ++j1) {
        double xi;
        if (axis == 0)
          xi = (j0 == n / 2) ? 0.0 : dxi * static_cast<double>(k0);
        else
          xi = (j1 == n / 2) ? 0.0 : dxi * static_cast<double>(j1);
        coeffs[j0 * half + j1] *= std::complex<double>(0.0, xi);
      }
    }
  }
  return was_physical ? to_physical(spec) : spec;
}

Propagator::Propagator(const UniformGrid& grid, const SymbolSpec& spec, double t)
    : grid_(grid), t_(t) {
  if (t < 0.0) throw InvalidArgument("propagator time must be >= 0");
  std::size_t nspec =
      detail::FftEngine::spectrum_size(grid.dim(), grid.points_per_axis());
  mult_.resize(2 * nspec);
  scratch_.resize(nspec);
  double norm = 1.0 / static_cast<double>(grid.size());
  for_each_bin(grid, [&](std::size_t idx, double xi, double) {
    double m = std::exp(-t * spec(xi)) * norm;
    mult_[2 * idx] = m;
    mult_[2 * idx + 1] = m;
  });
}

void Propagator::apply_inplace(AlignedVector<double>& u) const {
  if (u.size() != grid_.size())
    throw InvalidArgument("propagator applied to mismatched field length");
  auto& eng = detail::FftEngine::instance();
  eng.forward(grid_.dim(), grid_.points_per_axis(), u.data(), scratch_.data());
  double* sp = reinterpret_cast<double*>(scratch_.data());
  const double* m = mult_.data();
  for (std::size_t i = 0; i < mult_.size(); ++i) sp[i] *= m[i];
  // scratch_ holds no state across calls, so the fast clobbering inverse is
  // safe here.
  eng.inverse_destructive(grid_.dim(), grid_.points_per_axis(), scratch_.data(),
                          u.data());
}

Field convolve(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()))
    throw InvalidArgument("convolution requires matching grids");
  Field fa = to_frequency(a);
  Field fb = to_frequency(b);
  const UniformGrid& g = fa.grid();
  // Unitary spectra: conv = sqrt(n_total) * F^{-1}(fa * fb); the extra parity
  // factor re-centers x-ordered data so y = 0 sits at lattice midpoint.
  double scale = std::sqrt(static_cast<double>(g.size())) *
                 std::pow(g.dx(), g.dim());
  auto& ca = fa.spectrum();
  const auto& cb = fb.spectrum();
  for_each_bin(g, [&](std::size_t idx, double, double parity) {
    ca[idx] *= cb[idx] * parity * scale;
  });
  return to_physical(fa);
}

}  // namespace fkpp
