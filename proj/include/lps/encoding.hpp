#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lps/tensor.hpp"

namespace lps {

/// Binary Cartesian sampling pattern over phase encodes x frames.
struct SamplingMask {
  std::vector<std::uint8_t> pattern; // [ny, nt], row-major
  std::size_t ny = 0;
  std::size_t nt = 0;
  double target_af = 1.0;
  std::size_t n_center = 0;
  std::uint64_t seed = 0;

  std::uint8_t at(std::size_t row, std::size_t t) const {
    return pattern[row * nt + t];
  }
  std::size_t ones() const;
  double realized_af() const;
};

/// Per-frame random Cartesian mask: each frame samples round(ny/af) rows,
/// always including the n_center central rows. Central block for extent ny
/// starts at floor(ny/2) - ceil(n_center/2).
SamplingMask make_cartesian_mask(std::size_t ny, std::size_t nt, double af,
                                 std::size_t n_center, std::uint64_t seed);

/// The measurement operator A (mask + optional coil sensitivities).
class EncodingOperator {
public:
  EncodingOperator(SamplingMask mask, std::size_t nx);
  EncodingOperator(SamplingMask mask, ComplexTensor sensitivities); // [nc,nx,ny]

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return mask_.ny; }
  std::size_t nt() const { return mask_.nt; }
  std::size_t ncoils() const; // 0 = single-coil
  const SamplingMask &mask() const { return mask_; }
  const std::optional<ComplexTensor> &sensitivities() const { return sens_; }

private:
  SamplingMask mask_;
  std::size_t nx_;
  std::optional<ComplexTensor> sens_;
};

/// y = mask .* F x (single-coil, [nx,ny,nt]) or per-coil masked transforms
/// of sens_c .* x (multi-coil, [nc,nx,ny,nt]). Unsampled entries exactly 0.
ComplexTensor forward(const ComplexTensor &x, const EncodingOperator &op);

/// A*: F^H (mask .* y), summed over coils against conjugate sensitivities.
ComplexTensor adjoint(const ComplexTensor &y, const EncodingOperator &op);

/// grad of F(x) = 0.5*||A x - y||^2: A*(A x - y).
ComplexTensor grad_data_fidelity(const ComplexTensor &x,
                                 const ComplexTensor &y,
                                 const EncodingOperator &op);

/// nc smooth complex coil maps [nc,nx,ny], pixel-wise normalized so
/// sum_c |s_c|^2 = 1 exactly.
ComplexTensor make_sensitivities(std::size_t nc, std::size_t nx,
                                 std::size_t ny, std::uint64_t seed);

} // namespace lps
