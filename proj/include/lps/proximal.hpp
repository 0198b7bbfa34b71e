#pragma once

#include "lps/svd.hpp"
#include "lps/tensor.hpp"

namespace lps {

double sigmoid(double x);

/// Soft singular-value thresholding: U * diag(max(sigma_i - tau, 0)) * V^H.
ComplexTensor svt(const ComplexTensor &M, double tau);

/// Saved forward state for the learned-SVT backward pass.
struct LsvtTape {
  SvdFactors factors;
  double beta = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool gap_warning = false; // some spectral gap below 1e-9*sigma_1
};

/// Learned SVT: threshold tau = sigmoid(beta)*sigma_1, so the leading
/// singular value always survives.
ComplexTensor lsvt(const ComplexTensor &M, double beta, LsvtTape *tape);

struct LsvtGrads {
  ComplexTensor input_grad;
  double beta_grad = 0.0;
};

/// Reverse-mode through lsvt. beta_grad follows the U*diag(..)*V^H rule for
/// the threshold factor; input_grad is the differentiable-SVD chain rule
/// with gap denominators safeguarded by 1e-9*sigma_1^2.
LsvtGrads lsvt_backward(const LsvtTape &tape, const ComplexTensor &upstream);

/// Entrywise complex soft threshold: v -> v * max(|v|-tau, 0)/|v|.
ComplexTensor soft_threshold_complex(const ComplexTensor &x, double tau);

/// prox of tau*||F_t . ||_1: soft threshold in the temporal Fourier domain.
ComplexTensor temporal_fourier_prox(const ComplexTensor &s, double tau);

} // namespace lps
