#include "lps/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lps/fft.hpp"
#include "lps/rng.hpp"

namespace lps {

std::size_t SamplingMask::ones() const {
  std::size_t n = 0;
  for (auto v : pattern)
    n += v;
  return n;
}

double SamplingMask::realized_af() const {
  return double(ny * nt) / double(ones());
}

SamplingMask make_cartesian_mask(std::size_t ny, std::size_t nt, double af,
                                 std::size_t n_center, std::uint64_t seed) {
  if (ny == 0 || nt == 0 || af < 1.0)
    throw std::invalid_argument("make_cartesian_mask: need ny,nt>0 and af>=1");
  if (n_center > ny)
    throw std::invalid_argument("make_cartesian_mask: n_center > ny");
  const std::size_t n_lines =
      std::size_t(std::lround(double(ny) / af));
  if (n_lines < n_center)
    throw std::invalid_argument(
        "make_cartesian_mask: af too high to fit the center block");
  if (n_lines == 0)
    throw std::invalid_argument("make_cartesian_mask: af too high, no lines");

  const std::size_t c0 = ny / 2 - (n_center + 1) / 2;

  SamplingMask mask;
  mask.pattern.assign(ny * nt, 0);
  mask.ny = ny;
  mask.nt = nt;
  mask.target_af = af;
  mask.n_center = n_center;
  mask.seed = seed;

  Rng rng(seed);
  std::vector<std::size_t> outside;
  outside.reserve(ny - n_center);
  for (std::size_t r = 0; r < ny; ++r)
    if (r < c0 || r >= c0 + n_center)
      outside.push_back(r);

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t r = c0; r < c0 + n_center; ++r)
      mask.pattern[r * nt + t] = 1;
    // Partial Fisher-Yates over the non-center rows.
    std::vector<std::size_t> rows = outside;
    const std::size_t pick = n_lines - n_center;
    for (std::size_t i = 0; i < pick; ++i) {
      const std::size_t j = i + rng.below(rows.size() - i);
      std::swap(rows[i], rows[j]);
      mask.pattern[rows[i] * nt + t] = 1;
    }
  }

  const double realized = mask.realized_af();
  if (std::abs(realized - af) > 0.1 * af)
    throw std::invalid_argument(
        "make_cartesian_mask: realized acceleration outside +/-10% of target");
  return mask;
}

namespace {
void check_sens(const ComplexTensor &sens) {
  if (sens.ndim() != 3)
    throw std::invalid_argument("sensitivities must be [nc,nx,ny]");
  const std::size_t nc = sens.dim(0), nx = sens.dim(1), ny = sens.dim(2);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      double s = 0;
      for (std::size_t c = 0; c < nc; ++c)
        s += std::norm(sens.at(c, i, j));
      if (std::abs(s - 1.0) > 1e-10)
        throw std::invalid_argument(
            "sensitivities not normalized: sum_c |s_c|^2 != 1");
    }
}
} // namespace

EncodingOperator::EncodingOperator(SamplingMask mask, std::size_t nx)
    : mask_(std::move(mask)), nx_(nx) {}

EncodingOperator::EncodingOperator(SamplingMask mask,
                                   ComplexTensor sensitivities)
    : mask_(std::move(mask)), nx_(sensitivities.dim(1)),
      sens_(std::move(sensitivities)) {
  check_sens(*sens_);
  if (sens_->dim(2) != mask_.ny)
    throw std::invalid_argument("sensitivity ny does not match mask ny");
}

std::size_t EncodingOperator::ncoils() const {
  return sens_ ? sens_->dim(0) : 0;
}

namespace {

void apply_mask(ComplexTensor &kspace, const SamplingMask &mask) {
  const std::size_t nx = kspace.dim(0), ny = kspace.dim(1),
                    nt = kspace.dim(2);
  // Mask rows are in DC-centered order (the center block around ny/2 means
  // low frequencies); the FFT output has DC at row 0, so shift the index.
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t row = (j + ny / 2) % ny;
      for (std::size_t t = 0; t < nt; ++t)
        if (!mask.at(row, t))
          kspace.at(i, j, t) = 0.0;
    }
}

ComplexTensor coil_image(const ComplexTensor &x, const ComplexTensor &sens,
                         std::size_t c) {
  ComplexTensor out(x.dims());
  const std::size_t nx = x.dim(0), ny = x.dim(1), nt = x.dim(2);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const cplx s = sens.at(c, i, j);
      for (std::size_t t = 0; t < nt; ++t)
        out.at(i, j, t) = s * x.at(i, j, t);
    }
  return out;
}

} // namespace

ComplexTensor forward(const ComplexTensor &x, const EncodingOperator &op) {
  if (x.ndim() != 3 || x.dim(0) != op.nx() || x.dim(1) != op.ny() ||
      x.dim(2) != op.nt())
    throw std::invalid_argument("forward: image dims do not match operator");
  if (!op.sensitivities()) {
    ComplexTensor y = fft2_frames(x);
    apply_mask(y, op.mask());
    return y;
  }
  const ComplexTensor &sens = *op.sensitivities();
  const std::size_t nc = sens.dim(0);
  ComplexTensor y({nc, op.nx(), op.ny(), op.nt()});
  for (std::size_t c = 0; c < nc; ++c) {
    ComplexTensor yc = fft2_frames(coil_image(x, sens, c));
    apply_mask(yc, op.mask());
    for (std::size_t i = 0; i < op.nx(); ++i)
      for (std::size_t j = 0; j < op.ny(); ++j)
        for (std::size_t t = 0; t < op.nt(); ++t)
          y.at(c, i, j, t) = yc.at(i, j, t);
  }
  return y;
}

ComplexTensor adjoint(const ComplexTensor &y, const EncodingOperator &op) {
  if (!op.sensitivities()) {
    if (y.ndim() != 3 || y.dim(0) != op.nx() || y.dim(1) != op.ny() ||
        y.dim(2) != op.nt())
      throw std::invalid_argument("adjoint: dims do not match operator");
    ComplexTensor masked = y;
    apply_mask(masked, op.mask());
    return ifft2_frames(masked);
  }
  const ComplexTensor &sens = *op.sensitivities();
  const std::size_t nc = sens.dim(0);
  if (y.ndim() != 4 || y.dim(0) != nc || y.dim(1) != op.nx() ||
      y.dim(2) != op.ny() || y.dim(3) != op.nt())
    throw std::invalid_argument("adjoint: dims do not match operator");
  ComplexTensor x({op.nx(), op.ny(), op.nt()});
  for (std::size_t c = 0; c < nc; ++c) {
    ComplexTensor yc({op.nx(), op.ny(), op.nt()});
    for (std::size_t i = 0; i < op.nx(); ++i)
      for (std::size_t j = 0; j < op.ny(); ++j)
        for (std::size_t t = 0; t < op.nt(); ++t)
          yc.at(i, j, t) = y.at(c, i, j, t);
    apply_mask(yc, op.mask());
    ComplexTensor img = ifft2_frames(yc);
    for (std::size_t i = 0; i < op.nx(); ++i)
      for (std::size_t j = 0; j < op.ny(); ++j) {
        const cplx s = std::conj(sens.at(c, i, j));
        for (std::size_t t = 0; t < op.nt(); ++t)
          x.at(i, j, t) += s * img.at(i, j, t);
      }
  }
  return x;
}

ComplexTensor grad_data_fidelity(const ComplexTensor &x,
                                 const ComplexTensor &y,
                                 const EncodingOperator &op) {
  ComplexTensor residual = forward(x, op);
  residual -= y;
  return adjoint(residual, op);
}

ComplexTensor make_sensitivities(std::size_t nc, std::size_t nx,
                                 std::size_t ny, std::uint64_t seed) {
  if (nc < 1)
    throw std::invalid_argument("make_sensitivities: nc >= 1 required");
  Rng rng(seed);
  ComplexTensor sens({nc, nx, ny});
  const double radius = 0.55 * double(std::min(nx, ny));
  const double width = 0.8 * double(std::max(nx, ny));
  for (std::size_t c = 0; c < nc; ++c) {
    const double angle =
        2.0 * M_PI * double(c) / double(nc) + rng.uniform(-0.2, 0.2);
    const double cx = 0.5 * double(nx) + radius * std::cos(angle);
    const double cy = 0.5 * double(ny) + radius * std::sin(angle);
    const double px = rng.uniform(-0.3, 0.3);
    const double py = rng.uniform(-0.3, 0.3);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        const double dx = double(i) - cx, dy = double(j) - cy;
        const double mag =
            std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        const double phase = 2.0 * M_PI * (px * double(i) / double(nx) +
                                           py * double(j) / double(ny));
        sens.at(c, i, j) = mag * cplx(std::cos(phase), std::sin(phase));
      }
  }
  // Pixel-wise normalization makes sum_c |s_c|^2 = 1 exact.
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      double s = 0;
      for (std::size_t c = 0; c < nc; ++c)
        s += std::norm(sens.at(c, i, j));
      const double inv = 1.0 / std::sqrt(s);
      for (std::size_t c = 0; c < nc; ++c)
        sens.at(c, i, j) *= inv;
    }
  return sens;
}

} // namespace lps
