#pragma once

#include "lps/tensor.hpp"

namespace lps {

/// Mean over all pixels of |x - ref|^2.
double mse(const ComplexTensor &x, const ComplexTensor &ref);

/// 10*log10(peak^2/mse) with peak = max |ref|. Returns +infinity when the
/// error is exactly zero. Throws on an all-zero reference.
double psnr(const ComplexTensor &x, const ComplexTensor &ref);

/// Mean SSIM of magnitude images, per frame, 7x7 uniform window over valid
/// positions, K1=0.01, K2=0.03, dynamic range max |ref|.
double ssim(const ComplexTensor &x, const ComplexTensor &ref);

} // namespace lps
