#pragma once

#include <complex>
#include <cstddef>

#include "fkpp/common.hpp"

namespace fkpp::detail {

/// Thin cache of FFTW real-to-complex plans keyed by (dim, n).  Plans are
/// created with deterministic heuristics so identical inputs always produce
/// identical outputs.  Plan creation is serialized; execution on distinct
/// buffers is safe concurrently.
///
/// Transforms are unnormalized, matching FFTW: c2r(r2c(u)) == n_total * u.
/// Callers apply their own scaling.
class FftEngine {
 public:
  static FftEngine& instance();

  /// Spectral length of the half-complex representation: 1D n/2+1,
  /// 2D n*(n/2+1) in row-major [k0][k1] with the last axis halved.
  static std::size_t spectrum_size(int dim, std::size_t n);

  void forward(int dim, std::size_t n, const double* in, std::complex<double>* out);
  void inverse(int dim, std::size_t n, const std::complex<double>* in, double* out);
  /// Faster inverse that is allowed to clobber `in`.
  void inverse_destructive(int dim, std::size_t n, std::complex<double>* in,
                           double* out);

 private:
  FftEngine() = default;
  struct Impl;
  Impl* impl();
};

}  // namespace fkpp::detail
