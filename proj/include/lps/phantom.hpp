#pragma once

#include <cstdint>

#include "lps/encoding.hpp"
#include "lps/tensor.hpp"
#include "lps/training.hpp"

namespace lps {

struct PhantomSpec {
  std::size_t nx = 32, ny = 32, nt = 8;
  std::size_t background_rank = 3;
  std::size_t n_blobs = 2;
  double noise_std = 0.0; // k-space complex Gaussian, sampled entries only
  std::uint64_t seed = 0;

  void validate() const;
};

struct Phantom {
  ComplexTensor x;       // L_true + S_true, scaled so max |x| = 1
  ComplexTensor L_true;  // Casorati rank exactly background_rank
  ComplexTensor S_true;  // moving blobs, <= 10% of pixels per frame
};

Phantom generate_phantom(const PhantomSpec &spec);

/// Per-frame support of the dynamic blobs (1 where |S_true| > 0).
ComplexTensor blob_support(const Phantom &phantom);

struct MaskConfig {
  double af = 4.0;
  std::size_t n_center = 4;
  std::uint64_t seed = 0;
};

struct CoilConfig {
  std::size_t nc = 0; // 0 = single-coil
  std::uint64_t seed = 0;
};

/// Retrospectively undersampled training/eval pair.
TrainSample make_sample(const PhantomSpec &spec, const MaskConfig &mask_cfg,
                        const CoilConfig &coil_cfg, double noise_std);

} // namespace lps
