#include "fft_engine.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace fkpp::detail {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;          // input-preserving (1D); scratch-copied (2D)
  fftw_plan bwd_destroy = nullptr;  // may clobber the spectral input
};

}  // namespace

struct FftEngine::Impl {
  std::mutex mu;
  std::map<std::tuple<int, std::size_t>, PlanPair> plans;

  PlanPair& get(int dim, std::size_t n) {
    std::scoped_lock lock(mu);
    auto key = std::make_tuple(dim, n);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;

    std::size_t nreal = 1, nspec = FftEngine::spectrum_size(dim, n);
    for (int d = 0; d < dim; ++d) nreal *= n;
    double* rbuf = fftw_alloc_real(nreal);
    fftw_complex* cbuf = fftw_alloc_complex(nspec);

    PlanPair p;
    // FFTW_ESTIMATE keeps planning heuristic (no timing), so repeated runs
    // pick the same algorithm and outputs are bit-reproducible.
    if (dim == 1) {
      p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), rbuf, cbuf, FFTW_ESTIMATE);
      p.bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n), cbuf, rbuf,
                                   FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
      p.bwd_destroy =
          fftw_plan_dft_c2r_1d(static_cast<int>(n), cbuf, rbuf, FFTW_ESTIMATE);
    } else {
      p.fwd = fftw_plan_dft_r2c_2d(static_cast<int>(n), static_cast<int>(n), rbuf,
                                   cbuf, FFTW_ESTIMATE);
      // Multi-d c2r cannot preserve input; execution copies to scratch.
      p.bwd = fftw_plan_dft_c2r_2d(static_cast<int>(n), static_cast<int>(n), cbuf,
                                   rbuf, FFTW_ESTIMATE);
      p.bwd_destroy = p.bwd;
    }
    fftw_free(rbuf);
    fftw_free(cbuf);
    return plans.emplace(key, p).first->second;
  }
};

FftEngine& FftEngine::instance() {
  static FftEngine e;
  return e;
}

FftEngine::Impl* FftEngine::impl() {
  static Impl i;
  return &i;
}

std::size_t FftEngine::spectrum_size(int dim, std::size_t n) {
  std::size_t half = n / 2 + 1;
  return dim == 1 ? half : n * half;
}

void FftEngine::forward(int dim, std::size_t n, const double* in,
                        std::complex<double>* out) {
  PlanPair& p = impl()->get(dim, n);
  fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void FftEngine::inverse(int dim, std::size_t n, const std::complex<double>* in,
                        double* out) {
  PlanPair& p = impl()->get(dim, n);
  if (dim == 1) {
    fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(
                                    const_cast<std::complex<double>*>(in)),
                         out);
  } else {
    // c2r destroys its input in 2D; work on a scratch copy.
    std::size_t nspec = spectrum_size(dim, n);
    AlignedVector<std::complex<double>> scratch(in, in + nspec);
    fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(scratch.data()),
                         out);
  }
}

void FftEngine::inverse_destructive(int dim, std::size_t n,
                                    std::complex<double>* in, double* out) {
  PlanPair& p = impl()->get(dim, n);
  fftw_execute_dft_c2r(p.bwd_destroy, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace fkpp::detail
