#pragma once

#include <cstdint>
#include <vector>

#include "lps/tensor.hpp"

namespace lps {

/// Real 4-d array [ch, nx, ny, nt], row-major.
struct RealVolume {
  std::size_t ch = 0, nx = 0, ny = 0, nt = 0;
  std::vector<double> v;

  RealVolume() = default;
  RealVolume(std::size_t ch_, std::size_t nx_, std::size_t ny_,
             std::size_t nt_)
      : ch(ch_), nx(nx_), ny(ny_), nt(nt_), v(ch_ * nx_ * ny_ * nt_, 0.0) {}

  double &at(std::size_t c, std::size_t i, std::size_t j, std::size_t t) {
    return v[((c * nx + i) * ny + j) * nt + t];
  }
  double at(std::size_t c, std::size_t i, std::size_t j,
            std::size_t t) const {
    return v[((c * nx + i) * ny + j) * nt + t];
  }
};

/// 3x3x3 convolution layer (cross-correlation, zero padding 1).
struct Conv3dLayer {
  std::size_t in_ch = 0, out_ch = 0;
  std::vector<double> weights; // [out_ch, in_ch, 3, 3, 3]
  std::vector<double> bias;    // [out_ch]
  bool leaky = true;

  Conv3dLayer() = default;
  Conv3dLayer(std::size_t in, std::size_t out, bool leaky_relu)
      : in_ch(in), out_ch(out), weights(out * in * 27, 0.0), bias(out, 0.0),
        leaky(leaky_relu) {}

  double &w(std::size_t o, std::size_t i, std::size_t a, std::size_t b,
            std::size_t c) {
    return weights[(((o * in_ch + i) * 3 + a) * 3 + b) * 3 + c];
  }
  double w(std::size_t o, std::size_t i, std::size_t a, std::size_t b,
           std::size_t c) const {
    return weights[(((o * in_ch + i) * 3 + a) * 3 + b) * 3 + c];
  }
};

inline constexpr double kLeakyAlpha = 0.01;

double leaky_relu(double x, double alpha = kLeakyAlpha);
/// Derivative convention: alpha at exactly 0.
double leaky_relu_deriv(double x, double alpha = kLeakyAlpha);

/// Same-size convolution; activation applied when layer.leaky is set.
RealVolume conv3d_forward(const RealVolume &x, const Conv3dLayer &layer);

struct Conv3dGrads {
  RealVolume input_grad;
  std::vector<double> weight_grad;
  std::vector<double> bias_grad;
};

/// Reverse-mode through conv3d_forward. pre_activation is the linear output
/// saved by the forward pass (needed for the activation derivative).
Conv3dGrads conv3d_backward(const RealVolume &x, const Conv3dLayer &layer,
                            const RealVolume &pre_activation,
                            const RealVolume &upstream);

/// The residual CNN proximal block: channel plan 4 -> c -> c -> 2.
struct CnnBlockParams {
  std::vector<Conv3dLayer> layers;

  static CnnBlockParams make(std::size_t hidden);
  std::size_t hidden() const { return layers[0].out_ch; }
  std::size_t n_scalars() const;
};

/// Deterministic init: weights ~ N(0, 2/(in_ch*27)), biases zero.
CnnBlockParams init_params(std::size_t hidden, std::uint64_t seed);

struct CnnTape {
  RealVolume input;                        // 4-channel stacked Re/Im
  std::vector<RealVolume> pre_activation;  // per layer, before activation
  std::vector<RealVolume> layer_output;    // per layer, after activation
};

/// s_next = s_k + CNN([Re x, Im x, Re l, Im l]).
/// Zero parameters make this exactly s_k (identity skip on the S track).
ComplexTensor cnn_proximal_forward(const ComplexTensor &x_k,
                                   const ComplexTensor &l_next,
                                   const ComplexTensor &s_k,
                                   const CnnBlockParams &params,
                                   CnnTape *tape);

struct CnnGrads {
  ComplexTensor grad_x_k;
  ComplexTensor grad_l_next;
  ComplexTensor grad_s_k;
  std::vector<double> grad_params; // flat, layer order: weights then bias
};

CnnGrads cnn_proximal_backward(const CnnBlockParams &params,
                               const CnnTape &tape,
                               const ComplexTensor &upstream);

/// Flat parameter pack/unpack, declaration order per layer: weights, bias.
void cnn_pack(const CnnBlockParams &params, std::vector<double> &out);
void cnn_unpack(CnnBlockParams &params, const double *&cursor);

} // namespace lps
