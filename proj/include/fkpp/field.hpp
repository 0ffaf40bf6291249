#pragma once

#include <complex>
#include <cstddef>

#include "fkpp/common.hpp"
#include "fkpp/grid.hpp"

namespace fkpp {

enum class Space { physical, frequency };

/// A scalar field attached to a grid, in either physical or frequency space.
/// Physical data is real, one value per lattice point.  Frequency data stores
/// the Hermitian half-spectrum (real input guarantees conjugate symmetry), so
/// realness is preserved structurally on the way back.
///
/// Transforms are unitary: a forward/inverse round trip is the identity up to
/// rounding, and the l2 norm is preserved.
class Field {
 public:
  Field() = default;
  /// Zero field in physical space.
  explicit Field(const UniformGrid& grid);

  const UniformGrid& grid() const { return grid_; }
  Space space() const { return space_; }

  /// Physical values; throws unless space() == physical.
  AlignedVector<double>& values();
  const AlignedVector<double>& values() const;

  /// Half-spectrum; throws unless space() == frequency.
  AlignedVector<std::complex<double>>& spectrum();
  const AlignedVector<std::complex<double>>& spectrum() const;

  static Field from_values(const UniformGrid& grid, AlignedVector<double> vals);
  static Field from_spectrum(const UniformGrid& grid,
                             AlignedVector<std::complex<double>> spec);

 private:
  UniformGrid grid_;
  Space space_ = Space::physical;
  AlignedVector<double> values_;
  AlignedVector<std::complex<double>> spectrum_;
};

/// Unitary forward transform.  Identity if already in frequency space.
Field to_frequency(const Field& f);
/// Unitary inverse transform.  Identity if already in physical space.
Field to_physical(const Field& f);

/// Mean of a physical-space field (lattice average).
double mean(const Field& f);
/// Max |u| over the lattice (physical space).
double sup_norm(const Field& f);
/// l2 norm scaled by sqrt(dx^dim) (discrete L2).
double l2_norm(const Field& f);

/// Builds a physical field by evaluating fn at every lattice point.
/// In 2D fn receives (x, y); in 1D y is 0.
template <class Fn>
Field field_from_function(const UniformGrid& grid, Fn&& fn) {
  AlignedVector<double> vals(grid.size());
  std::size_t n = grid.points_per_axis();
  if (grid.dim() == 1) {
    for (std::size_t j = 0; j < n; ++j) vals[j] = fn(grid.coord(j), 0.0);
  } else {
    for (std::size_t j0 = 0; j0 < n; ++j0)
      for (std::size_t j1 = 0; j1 < n; ++j1)
        vals[j0 * n + j1] = fn(grid.coord(j0), grid.coord(j1));
  }
  return Field::from_values(grid, std::move(vals));
}

}  // namespace fkpp
