#include "lps/phantom.hpp"

#include <cmath>
#include <stdexcept>

#include "lps/rng.hpp"

namespace lps {

void PhantomSpec::validate() const {
  if (nx < 8 || ny < 8)
    throw std::invalid_argument("PhantomSpec: extents >= 8 required");
  if (nt < 1)
    throw std::invalid_argument("PhantomSpec: nt >= 1 required");
  if (background_rank < 1 || background_rank > nt)
    throw std::invalid_argument("PhantomSpec: need 1 <= rank <= nt");
}

Phantom generate_phantom(const PhantomSpec &spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t nx = spec.nx, ny = spec.ny, nt = spec.nt;

  Phantom ph;
  ph.L_true = ComplexTensor({nx, ny, nt});
  ph.S_true = ComplexTensor({nx, ny, nt});

  // Background: rank-r sum of smooth spatial modes times smooth temporal
  // profiles.
  for (std::size_t r = 0; r < spec.background_rank; ++r) {
    std::vector<double> mode(nx * ny, 0.0);
    const std::size_t n_gauss = 2 + rng.below(2);
    for (std::size_t g = 0; g < n_gauss; ++g) {
      const double cx = rng.uniform(0.2, 0.8) * double(nx);
      const double cy = rng.uniform(0.2, 0.8) * double(ny);
      const double w = rng.uniform(0.06, 0.15) * double(std::max(nx, ny));
      const double amp = rng.uniform(0.4, 1.0);
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
          const double dx = double(i) - cx, dy = double(j) - cy;
          mode[i * ny + j] +=
              amp * std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
        }
    }
    const double freq = double(r + 1);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    const double offset = rng.uniform(0.3, 0.8);
    const double swing = rng.uniform(0.2, 0.6);
    for (std::size_t t = 0; t < nt; ++t) {
      const double c =
          offset + swing * std::sin(2.0 * M_PI * freq * double(t) /
                                        double(nt) +
                                    phase);
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
          ph.L_true.at(i, j, t) += mode[i * ny + j] * c;
    }
  }

  // Foreground: elliptical blobs on periodic trajectories, capped so the
  // per-frame support stays below 10% of the pixels.
  const double max_area = 0.08 * double(nx * ny) /
                          double(std::max<std::size_t>(1, spec.n_blobs));
  for (std::size_t b = 0; b < spec.n_blobs; ++b) {
    const double orbit_r = rng.uniform(0.18, 0.32) * double(std::min(nx, ny));
    const double base_x = rng.uniform(0.35, 0.65) * double(nx);
    const double base_y = rng.uniform(0.35, 0.65) * double(ny);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    double ra = rng.uniform(2.5, 4.5);
    double rb = rng.uniform(2.5, 4.5);
    const double area = M_PI * ra * rb;
    if (area > max_area) {
      const double shrink = std::sqrt(max_area / area);
      ra *= shrink;
      rb *= shrink;
    }
    const double amp = rng.uniform(1.1, 1.6);
    for (std::size_t t = 0; t < nt; ++t) {
      const double ang = 2.0 * M_PI * double(t) / double(nt) + phase;
      const double cx = base_x + orbit_r * std::cos(ang);
      const double cy = base_y + orbit_r * std::sin(ang);
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
          const double dx = (double(i) - cx) / ra;
          const double dy = (double(j) - cy) / rb;
          const double r2 = dx * dx + dy * dy;
          // Cosine taper inside the ellipse: exact support, soft edge.
          if (r2 < 1.0)
            ph.S_true.at(i, j, t) +=
                amp * 0.5 * (1.0 + std::cos(M_PI * std::sqrt(r2)));
        }
    }
  }

  // Smooth spatial phase, applied identically to both components.
  const double px = rng.uniform(-0.5, 0.5);
  const double py = rng.uniform(-0.5, 0.5);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const double a = 2.0 * M_PI * (px * double(i) / double(nx) +
                                     py * double(j) / double(ny));
      const cplx rot(std::cos(a), std::sin(a));
      for (std::size_t t = 0; t < nt; ++t) {
        ph.L_true.at(i, j, t) *= rot;
        ph.S_true.at(i, j, t) *= rot;
      }
    }

  ph.x = ph.L_true + ph.S_true;
  double peak = 0.0;
  for (std::size_t i = 0; i < ph.x.size(); ++i)
    peak = std::max(peak, std::abs(ph.x[i]));
  if (peak > 0.0) {
    const double inv = 1.0 / peak;
    ph.L_true *= inv;
    ph.S_true *= inv;
    // Re-sum after scaling so x == L_true + S_true holds bit-exactly.
    ph.x = ph.L_true + ph.S_true;
  }
  return ph;
}

ComplexTensor blob_support(const Phantom &phantom) {
  ComplexTensor support = ComplexTensor::zeros_like(phantom.S_true);
  for (std::size_t i = 0; i < support.size(); ++i)
    if (std::abs(phantom.S_true[i]) > 0.0)
      support[i] = 1.0;
  return support;
}

TrainSample make_sample(const PhantomSpec &spec, const MaskConfig &mask_cfg,
                        const CoilConfig &coil_cfg, double noise_std) {
  const Phantom ph = generate_phantom(spec);
  SamplingMask mask = make_cartesian_mask(spec.ny, spec.nt, mask_cfg.af,
                                          mask_cfg.n_center, mask_cfg.seed);
  EncodingOperator op =
      coil_cfg.nc == 0
          ? EncodingOperator(std::move(mask), spec.nx)
          : EncodingOperator(std::move(mask),
                             make_sensitivities(coil_cfg.nc, spec.nx, spec.ny,
                                                coil_cfg.seed));
  ComplexTensor y = forward(ph.x, op);
  if (noise_std > 0.0) {
    // Noise only where the mask samples.
    Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
    const std::size_t nt = op.nt(), ny_ = op.ny();
    for (std::size_t idx = 0; idx < y.size(); ++idx) {
      const std::size_t t = idx % nt;
      const std::size_t j = (idx / nt) % ny_;
      const cplx n(noise_std * rng.normal(), noise_std * rng.normal());
      if (op.mask().at((j + ny_ / 2) % ny_, t))
        y[idx] += n;
    }
  }
  return TrainSample{std::move(y), std::move(op), ph.x};
}

} // namespace lps
