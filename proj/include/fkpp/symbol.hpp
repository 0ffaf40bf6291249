#pragma once

#include <cstddef>

#include "fkpp/common.hpp"
#include "fkpp/field.hpp"
#include "fkpp/grid.hpp"

namespace fkpp {

/// Fourier symbol m(xi) of the diffusion operator: |xi|^2 for the local part,
/// |xi|^(2s) for the fractional part, or their sum.  m >= 0 with equality
/// only at xi = 0, so e^{-t m} preserves the mean exactly and contracts every
/// other mode.
struct SymbolSpec {
  double s = 0.5;
  bool include_local = true;
  bool include_fractional = true;

  double operator()(double xi_abs) const;
};

/// Validates 0 < s < 1 and at least one operator part enabled.
SymbolSpec make_symbol(double s, bool include_local, bool include_fractional);

/// Applies e^{-t m(xi)} mode by mode.  t = 0 returns the input unchanged
/// (bitwise).  A physical-space field goes through a forward/inverse
/// transform pair; a frequency-space field is multiplied in place.
Field apply_multiplier(const Field& f, const SymbolSpec& spec, double t);

/// Applies the generator itself: (L u)^(xi) = m(xi) u^(xi).
Field apply_generator(const Field& f, const SymbolSpec& spec);

/// Spatial derivative along one axis by the i*xi multiplier.  The Nyquist
/// mode has no odd representative and is zeroed.
Field apply_derivative(const Field& f, int axis = 0);

/// Precomputed e^{-t m} multiplier bound to one (grid, spec, t), with the
/// inverse-transform normalization folded in.  This is the solver hot path:
/// one forward transform, one scaled multiply, one inverse transform.
class Propagator {
 public:
  Propagator(const UniformGrid& grid, const SymbolSpec& spec, double t);

  const UniformGrid& grid() const { return grid_; }
  double time() const { return t_; }

  /// u <- T_t u on raw physical values (length grid.size()).
  void apply_inplace(AlignedVector<double>& u) const;

 private:
  UniformGrid grid_;
  double t_;
  // e^{-t m(xi_k)} / n_total per spectral bin, stored twice per bin to match
  // the interleaved re/im layout so the hot multiply is a flat product.
  AlignedVector<double> mult_;
  mutable AlignedVector<std::complex<double>> scratch_;
};

/// Periodic convolution of two lattice functions on [-L, L)^dim, scaled by
/// dx^dim: returns x |-> sum_y a(y) b(x - y) dx^dim with wrap-around.
Field convolve(const Field& a, const Field& b);

}  // namespace fkpp
