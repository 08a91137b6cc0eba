#pragma once
// Real-input FFT over FFTW3. Unnormalized in both directions:
//   X_k = sum_j x_j exp(-2 pi i j k / n),   x_j = sum_k X_k exp(+2 pi i j k / n)
// so inverse(forward(x)) = n x.

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace iwv::fft {

namespace detail {
// FFTW's planner is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)))) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  T* ptr;
};

struct Plan {
  explicit Plan(fftw_plan p) : plan(p) {
    if (!p) throw std::runtime_error("FFTW planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  fftw_plan plan;
};
}  // namespace detail

/// Bins 0..n/2 of the DFT of a real sequence.
inline std::vector<std::complex<double>> forward_real(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t m = n / 2 + 1;
  detail::FftwBuffer<double> in(n);
  detail::FftwBuffer<fftw_complex> out(m);
  std::unique_ptr<detail::Plan> plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan = std::make_unique<detail::Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.ptr, out.ptr, FFTW_ESTIMATE));
  }
  std::memcpy(in.ptr, x.data(), n * sizeof(double));
  fftw_execute(plan->plan);
  std::vector<std::complex<double>> X(m);
  for (std::size_t k = 0; k < m; ++k) X[k] = {out.ptr[k][0], out.ptr[k][1]};
  return X;
}

/// Real sequence of length n from its Hermitian half-spectrum (n/2 + 1 bins).
inline std::vector<double> inverse_real(std::span<const std::complex<double>> X, std::size_t n) {
  const std::size_t m = n / 2 + 1;
  if (X.size() != m) throw std::invalid_argument("inverse_real: half-spectrum size mismatch");
  detail::FftwBuffer<fftw_complex> in(m);
  detail::FftwBuffer<double> out(n);
  std::unique_ptr<detail::Plan> plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan = std::make_unique<detail::Plan>(
        fftw_plan_dft_c2r_1d(static_cast<int>(n), in.ptr, out.ptr, FFTW_ESTIMATE));
  }
  // c2r destroys its input; fill after planning.
  for (std::size_t k = 0; k < m; ++k) {
    in.ptr[k][0] = X[k].real();
    in.ptr[k][1] = X[k].imag();
  }
  fftw_execute(plan->plan);
  return std::vector<double>(out.ptr, out.ptr + n);
}

}  // namespace iwv::fft
