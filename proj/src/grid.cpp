#include "fkpp/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fkpp {

namespace {
bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

double UniformGrid::dxi() const { return std::numbers::pi / half_width_; }

std::size_t UniformGrid::size() const {
  std::size_t s = 1;
  for (int d = 0; d < dim_; ++d) s *= n_;
  return s;
}

long long UniformGrid::freq_index(std::size_t j) const {
  auto n = static_cast<long long>(n_);
  auto jj = static_cast<long long>(j);
  return jj < n / 2 ? jj : jj - n;
}

std::vector<double> UniformGrid::axis_coords() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = coord(j);
  return xs;
}

UniformGrid make_grid(int dim, std::size_t points_per_axis, double half_width) {
  if (dim != 1 && dim != 2)
    throw InvalidArgument("grid dim must be 1 or 2, got " + std::to_string(dim));
  if (!is_pow2(points_per_axis) || points_per_axis < 8)
    throw InvalidArgument("grid points_per_axis must be a power of two >= 8, got " +
                          std::to_string(points_per_axis));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw InvalidArgument("grid half_width must be positive and finite");
  UniformGrid g;
  g.dim_ = dim;
  g.n_ = points_per_axis;
  g.half_width_ = half_width;
  return g;
}

}  // namespace fkpp
