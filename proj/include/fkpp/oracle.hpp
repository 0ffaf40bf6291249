#pragma once

#include "fkpp/kernels.hpp"

namespace fkpp::kernels {

/// Free-space kernel value at a single point by direct numerical Fourier
/// inversion:
///   1D:  (1/pi)    \int_0^Xi cos(x xi)  e^{-t m(xi)}  dxi
///   2D:  (1/2pi)   \int_0^Xi J0(|x| r)  e^{-t m(r)} r dr      (radial)
/// The cutoff Xi is chosen so the discarded tail is below 1e-12 in absolute
/// value; the oscillatory integrand is split into half-period panels, each
/// integrated by adaptive Gauss-Kronrod, and the panel sums are compensated.
///
/// This path shares nothing with the spectral construction (no lattice, no
/// transform), so it serves as an independent cross-check of KernelTable.
/// The 2D route is experimental: slowly decaying Bessel tails make it far
/// more expensive than the 1D form.
double kernel_by_quadrature(int dim, double t, double x_abs, double s, Kind kind);

}  // namespace fkpp::kernels
