#include "lps/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lps {

double mse(const ComplexTensor &x, const ComplexTensor &ref) {
  if (!x.same_dims(ref))
    throw std::invalid_argument("mse: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += std::norm(x[i] - ref[i]);
  return acc / double(x.size());
}

double psnr(const ComplexTensor &x, const ComplexTensor &ref) {
  double peak = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    peak = std::max(peak, std::abs(ref[i]));
  if (peak == 0.0)
    throw std::invalid_argument("psnr: reference is identically zero");
  const double err = mse(x, ref);
  if (err == 0.0)
    return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / err);
}

double ssim(const ComplexTensor &x, const ComplexTensor &ref) {
  if (!x.same_dims(ref))
    throw std::invalid_argument("ssim: dimension mismatch");
  if (x.ndim() != 3)
    throw std::invalid_argument("ssim: expects a [nx,ny,nt] tensor");
  const std::size_t nx = x.dim(0), ny = x.dim(1), nt = x.dim(2);
  constexpr std::size_t win = 7;
  if (nx < win || ny < win)
    throw std::invalid_argument("ssim: frames smaller than the 7x7 window");

  double range = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    range = std::max(range, std::abs(ref[i]));
  const double c1 = std::pow(0.01 * range, 2);
  const double c2 = std::pow(0.03 * range, 2);

  double total = 0.0;
  std::size_t n_windows = 0;
  std::vector<double> a(nx * ny), b(nx * ny);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        a[i * ny + j] = std::abs(x.at(i, j, t));
        b[i * ny + j] = std::abs(ref.at(i, j, t));
      }
    for (std::size_t i = 0; i + win <= nx; ++i)
      for (std::size_t j = 0; j + win <= ny; ++j) {
        double ma = 0, mb = 0;
        for (std::size_t u = 0; u < win; ++u)
          for (std::size_t v = 0; v < win; ++v) {
            ma += a[(i + u) * ny + j + v];
            mb += b[(i + u) * ny + j + v];
          }
        const double n = double(win * win);
        ma /= n;
        mb /= n;
        double va = 0, vb = 0, cov = 0;
        for (std::size_t u = 0; u < win; ++u)
          for (std::size_t v = 0; v < win; ++v) {
            const double da = a[(i + u) * ny + j + v] - ma;
            const double db = b[(i + u) * ny + j + v] - mb;
            va += da * da;
            vb += db * db;
            cov += da * db;
          }
        va /= n - 1.0;
        vb /= n - 1.0;
        cov /= n - 1.0;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                 ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++n_windows;
      }
  }
  return total / double(n_windows);
}

} // namespace lps
