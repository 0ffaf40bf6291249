#pragma once

#include <cstdint>
#include <vector>

#include "fkpp/common.hpp"
#include "fkpp/field.hpp"
#include "fkpp/kernels.hpp"
#include "fkpp/symbol.hpp"

namespace fkpp::spaces {

/// Polynomially weighted sup norm ||u|| = sup |u(x)| / (1 + |x|^gamma).
/// Requires 0 <= gamma < 2s so the nonlocal tail integrals stay finite.
struct WeightedNorm {
  double gamma = 0.0;
  double s = 0.5;
};

WeightedNorm make_weighted_norm(double gamma, double s);

double xgamma_norm(const Field& u, double gamma);

/// Power-law comparison profile: eps = a0 r0^-(N+2s) inside |x| <= r0,
/// a0 |x|^-(N+2s) outside; continuous at the seam.
struct PowerLawBarrier {
  double a0 = 1.0;
  double r0 = 1.0;
  double s = 0.5;
};

PowerLawBarrier make_barrier(double a0, double r0, double s);
double barrier_plateau(const PowerLawBarrier& b, int dim);
Field barrier_field(const UniformGrid& grid, const PowerLawBarrier& b);

enum class PropagateRoute { multiplier, convolution };

/// Heat semigroup T_t through the multiplier, or through periodic
/// convolution with the matching spectral kernel table (the cross-check
/// route).
Field propagate(const Field& u, const SymbolSpec& spec, double t,
                PropagateRoute route = PropagateRoute::multiplier);

struct GrowthReport {
  double gamma = 0.0;
  std::vector<double> times;
  std::vector<double> fitted_C;  // per time, max over the probe family
  double stability_ratio = 0.0;  // max/min of fitted_C
  std::vector<CheckResult> checks;
};

/// Estimates the X_gamma operator-norm envelope of T_t over a probe family
/// (constants, the weight itself, indicators, seeded rough fields):
/// ||T_t||_gamma <= C (1 + t^(gamma/2) + t^(gamma/2s)).  gamma = 0 asserts
/// plain sup-contraction within 1e-10.
GrowthReport check_semigroup_growth(const UniformGrid& grid,
                                    const SymbolSpec& spec, double gamma,
                                    const std::vector<double>& times,
                                    std::uint64_t seed = 2026);

struct BarrierPushReport {
  double t = 0.0;
  double fitted_lower = 0.0;  // c in  c t/(t^{N/2s+1}+1) a0 |x|^-(N+2s)
  double fitted_upper = 0.0;  // C in  C (1 + r0^{-2s} t)   a0 |x|^-(N+2s)
  double plateau_sup = 0.0;   // sup of T_t v0 over |x| <= r0
  std::vector<CheckResult> checks;
};

/// Propagates the power-law barrier and fits the two-sided tail envelope at
/// time t >= 1, over r0 <= |x| <= L/4.
BarrierPushReport push_powerlaw_barrier(const UniformGrid& grid,
                                        const SymbolSpec& spec,
                                        const PowerLawBarrier& b, double t);

struct WeightPushReport {
  double t = 0.0;
  double gamma = 0.0;
  double fitted_upper = 0.0;  // C_gamma in T_t w <= C (|x|^g + t^{g/2s})
  double fitted_lower = 0.0;  // c_gamma in T_t w >= c |x|^g for |x| >= t^{1/2s}
  std::vector<CheckResult> checks;
};

/// Propagates the weight w_gamma = |x|^gamma and fits envelope constants on
/// the bulk (t >= 1).  gamma = 0 reduces to exact conservation of 1.
WeightPushReport push_polynomial_weight(const UniformGrid& grid,
                                        const SymbolSpec& spec, double gamma,
                                        double t);

struct MaxPrincipleReport {
  double worst_defect = 0.0;  // max over probes of -(L u)(argmax)/||L u||_sup
  std::size_t probes = 0;
  std::vector<CheckResult> checks;
};

/// Pointwise generator sign at the maximum: for smooth band-limited probes,
/// (L u)(argmax u) >= -tol * ||L u||_sup.  Probes are random trigonometric
/// polynomials with band <= n/16; argmax and L u are evaluated on a
/// spectrally oversampled lattice so the lattice argmax tracks the true one.
MaxPrincipleReport check_discrete_max_principle(const UniformGrid& grid,
                                                const SymbolSpec& spec,
                                                std::size_t n_probes = 100,
                                                std::uint64_t seed = 7,
                                                double tol = 1e-8);

}  // namespace fkpp::spaces
