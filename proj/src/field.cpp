#include "fkpp/field.hpp"

#include <cmath>

#include "fft_engine.hpp"

namespace fkpp {

Field::Field(const UniformGrid& grid)
    : grid_(grid), space_(Space::physical), values_(grid.size(), 0.0) {}

AlignedVector<double>& Field::values() {
  if (space_ != Space::physical)
    throw InvalidArgument("field is in frequency space; physical values unavailable");
  return values_;
}

const AlignedVector<double>& Field::values() const {
  if (space_ != Space::physical)
    throw InvalidArgument("field is in frequency space; physical values unavailable");
  return values_;
}

AlignedVector<std::complex<double>>& Field::spectrum() {
  if (space_ != Space::frequency)
    throw InvalidArgument("field is in physical space; spectrum unavailable");
  return spectrum_;
}

const AlignedVector<std::complex<double>>& Field::spectrum() const {
  if (space_ != Space::frequency)
    throw InvalidArgument("field is in physical space; spectrum unavailable");
  return spectrum_;
}

Field Field::from_values(const UniformGrid& grid, AlignedVector<double> vals) {
  if (vals.size() != grid.size())
    throw InvalidArgument("field value count does not match grid size");
  Field f;
  f.grid_ = grid;
  f.space_ = Space::physical;
  f.values_ = std::move(vals);
  return f;
}

Field Field::from_spectrum(const UniformGrid& grid,
                           AlignedVector<std::complex<double>> spec) {
  std::size_t want = detail::FftEngine::spectrum_size(grid.dim(), grid.points_per_axis());
  if (spec.size() != want)
    throw InvalidArgument("field spectrum length does not match grid");
  Field f;
  f.grid_ = grid;
  f.space_ = Space::frequency;
  f.spectrum_ = std::move(spec);
  return f;
}

Field to_frequency(const Field& f) {
  if (f.space() == Space::frequency) return f;
  const UniformGrid& g = f.grid();
  std::size_t nspec =
      detail::FftEngine::spectrum_size(g.dim(), g.points_per_axis());
  AlignedVector<std::complex<double>> spec(nspec);
  detail::FftEngine::instance().forward(g.dim(), g.points_per_axis(),
                                        f.values().data(), spec.data());
  double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
  for (auto& c : spec) c *= scale;
  return Field::from_spectrum(g, std::move(spec));
}

Field to_physical(const Field& f) {
  if (f.space() == Space::physical) return f;
  const UniformGrid& g = f.grid();
  AlignedVector<double> vals(g.size());
  detail::FftEngine::instance().inverse(g.dim(), g.points_per_axis(),
                                        f.spectrum().data(), vals.data());
  double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
  for (auto& v : vals) v *= scale;
  return Field::from_values(g, std::move(vals));
}

double mean(const Field& f) {
  const auto& v = f.values();
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sup_norm(const Field& f) {
  const auto& v = f.values();
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(const Field& f) {
  const auto& v = f.values();
  double acc = 0.0;
  for (double x : v) acc += x * x;
  double dv = std::pow(f.grid().dx(), f.grid().dim());
  return std::sqrt(acc * dv);
}

}  // namespace fkpp
