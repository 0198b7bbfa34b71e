#pragma once

#include "lps/tensor.hpp"

namespace lps {

// Orthonormal transforms (unitary scaling 1/sqrt(n) per direction), so each
// inverse is the exact adjoint and Parseval holds.

/// 2D FFT over the two spatial axes of a [nx,ny,nt] tensor, frame by frame.
ComplexTensor fft2_frames(const ComplexTensor &x);
ComplexTensor ifft2_frames(const ComplexTensor &x);

/// 1D FFT along the last (temporal) axis of a [nx,ny,nt] tensor.
ComplexTensor fft_time(const ComplexTensor &x);
ComplexTensor ifft_time(const ComplexTensor &x);

} // namespace lps
