#pragma once

#include <cstddef>
#include <vector>

#include "fkpp/common.hpp"

namespace fkpp {

/// Uniform periodic lattice on [-L, L)^dim with a power-of-two point count
/// per axis.  Physical spacing dx = 2L/n; resolvable frequencies are
/// xi_k = pi*k/L for k = -n/2 .. n/2-1.
class UniformGrid {
 public:
  UniformGrid() = default;

  int dim() const { return dim_; }
  std::size_t points_per_axis() const { return n_; }
  double half_width() const { return half_width_; }
  double dx() const { return 2.0 * half_width_ / static_cast<double>(n_); }
  /// Spacing between adjacent frequencies, pi/L.
  double dxi() const;
  /// Total number of lattice points, n^dim.
  std::size_t size() const;

  /// Physical coordinate of lattice index j in [0, n): x_j = -L + j*dx.
  double coord(std::size_t j) const { return -half_width_ + static_cast<double>(j) * dx(); }
  /// Signed integer frequency for index j in [0, n): j for j < n/2, j-n above.
  long long freq_index(std::size_t j) const;
  /// Frequency value xi for axis index j (FFT storage order).
  double freq(std::size_t j) const { return dxi() * static_cast<double>(freq_index(j)); }

  /// All physical coordinates along one axis, in storage order.
  std::vector<double> axis_coords() const;

  bool operator==(const UniformGrid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_;
  }

  friend UniformGrid make_grid(int dim, std::size_t points_per_axis, double half_width);

 private:
  int dim_ = 1;
  std::size_t n_ = 8;
  double half_width_ = 1.0;
};

/// Validates and constructs a grid.  points_per_axis must be a power of two
/// >= 8, half_width > 0, dim 1 or 2.
UniformGrid make_grid(int dim, std::size_t points_per_axis, double half_width);

}  // namespace fkpp
