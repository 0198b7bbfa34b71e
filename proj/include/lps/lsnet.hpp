#pragma once

#include <cstdint>
#include <vector>

#include "lps/encoding.hpp"
#include "lps/neural.hpp"
#include "lps/proximal.hpp"
#include "lps/tensor.hpp"

namespace lps {

/// Per-block learnables of the unrolled network.
struct LsNetParams {
  int n_iter = 10;
  std::size_t hidden = 32;
  double alpha = kLeakyAlpha;
  std::vector<double> beta;          // init -2
  std::vector<double> gamma;         // init 1
  std::vector<CnnBlockParams> cnn;

  static LsNetParams init(int n_iter, std::size_t hidden, std::uint64_t seed);
  static LsNetParams zeros(int n_iter, std::size_t hidden);

  std::size_t n_scalars() const;
  std::vector<double> to_flat() const;
  void from_flat(const std::vector<double> &flat);
};

struct BlockTape {
  ComplexTensor X_k, S_k;   // block inputs
  ComplexTensor L_next;     // low-rank layer output
  ComplexTensor grad_F;     // data-consistency gradient at L_next + S_next
  LsvtTape svd_tape;
  CnnTape cnn_tape;
};

struct ForwardTape {
  std::vector<BlockTape> blocks;
};

struct LsNetOutput {
  ComplexTensor X, L, S;
};

/// Alg: S_0 = 0, L_0 = X_0 = A*y; per block LSVT -> CNN prox -> data
/// consistency. Tape is optional (needed only for backward).
LsNetOutput lsnet_forward(const ComplexTensor &y, const EncodingOperator &op,
                          const LsNetParams &params, ForwardTape *tape);

/// Gradients in the same flat layout as LsNetParams::to_flat().
std::vector<double> lsnet_backward(const ForwardTape &tape,
                                   const EncodingOperator &op,
                                   const LsNetParams &params,
                                   const ComplexTensor &grad_X_N);

struct MseLoss {
  double value = 0.0;
  ComplexTensor grad; // 2*(X - ref)
};

/// Sum over pixels of squared complex magnitude differences.
MseLoss loss_mse(const ComplexTensor &x, const ComplexTensor &ref);

} // namespace lps
