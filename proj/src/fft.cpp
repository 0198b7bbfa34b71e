#include "lps/fft.hpp"

#include <cmath>
#include <cstring>
#include <fftw3.h>
#include <mutex>
#include <stdexcept>

namespace lps {

namespace {

// FFTW planning is not thread-safe; execution of a private plan is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  fftw_complex *ptr = nullptr;
  explicit FftwBuffer(std::size_t n) {
    ptr = fftw_alloc_complex(n);
    if (!ptr)
      throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer &) = delete;
  FftwBuffer &operator=(const FftwBuffer &) = delete;
};

ComplexTensor transform2d(const ComplexTensor &x, int sign) {
  if (x.ndim() != 3)
    throw std::invalid_argument("fft2_frames expects a 3-dim tensor");
  const std::size_t nx = x.dim(0), ny = x.dim(1), nt = x.dim(2);
  const double scale = 1.0 / std::sqrt(double(nx) * double(ny));

  FftwBuffer buf(nx * ny);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_2d(int(nx), int(ny), buf.ptr, buf.ptr, sign,
                            FFTW_ESTIMATE);
  }
  if (!plan)
    throw std::runtime_error("fftw planning failed");

  ComplexTensor out(x.dims());
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        const cplx v = x.at(i, j, t);
        buf.ptr[i * ny + j][0] = v.real();
        buf.ptr[i * ny + j][1] = v.imag();
      }
    fftw_execute(plan);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j)
        out.at(i, j, t) =
            scale * cplx(buf.ptr[i * ny + j][0], buf.ptr[i * ny + j][1]);
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

ComplexTensor transform_time(const ComplexTensor &x, int sign) {
  if (x.ndim() != 3)
    throw std::invalid_argument("fft_time expects a 3-dim tensor");
  const std::size_t nx = x.dim(0), ny = x.dim(1), nt = x.dim(2);
  const double scale = 1.0 / std::sqrt(double(nt));

  FftwBuffer buf(nt);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(int(nt), buf.ptr, buf.ptr, sign, FFTW_ESTIMATE);
  }
  if (!plan)
    throw std::runtime_error("fftw planning failed");

  ComplexTensor out(x.dims());
  for (std::size_t p = 0; p < nx * ny; ++p) {
    // Temporal series are contiguous in row-major [nx,ny,nt].
    const cplx *series = x.data() + p * nt;
    for (std::size_t t = 0; t < nt; ++t) {
      buf.ptr[t][0] = series[t].real();
      buf.ptr[t][1] = series[t].imag();
    }
    fftw_execute(plan);
    cplx *dst = out.data() + p * nt;
    for (std::size_t t = 0; t < nt; ++t)
      dst[t] = scale * cplx(buf.ptr[t][0], buf.ptr[t][1]);
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

} // namespace

ComplexTensor fft2_frames(const ComplexTensor &x) {
  return transform2d(x, FFTW_FORWARD);
}

ComplexTensor ifft2_frames(const ComplexTensor &x) {
  return transform2d(x, FFTW_BACKWARD);
}

ComplexTensor fft_time(const ComplexTensor &x) {
  return transform_time(x, FFTW_FORWARD);
}

ComplexTensor ifft_time(const ComplexTensor &x) {
  return transform_time(x, FFTW_BACKWARD);
}

} // namespace lps
