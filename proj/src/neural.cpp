#include "lps/neural.hpp"

#include <cmath>
#include <stdexcept>

#include "lps/rng.hpp"

namespace lps {

double leaky_relu(double x, double alpha) { return x > 0.0 ? x : alpha * x; }

double leaky_relu_deriv(double x, double alpha) {
  return x > 0.0 ? 1.0 : alpha;
}

RealVolume conv3d_forward(const RealVolume &x, const Conv3dLayer &layer) {
  if (x.ch != layer.in_ch)
    throw std::invalid_argument("conv3d_forward: channel mismatch");
  const std::size_t nx = x.nx, ny = x.ny, nt = x.nt;
  RealVolume out(layer.out_ch, nx, ny, nt);
  for (std::size_t o = 0; o < layer.out_ch; ++o)
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t t = 0; t < nt; ++t) {
          double acc = layer.bias[o];
          for (std::size_t c = 0; c < layer.in_ch; ++c)
            for (std::size_t a = 0; a < 3; ++a) {
              const std::ptrdiff_t ii = std::ptrdiff_t(i + a) - 1;
              if (ii < 0 || ii >= std::ptrdiff_t(nx))
                continue;
              for (std::size_t b = 0; b < 3; ++b) {
                const std::ptrdiff_t jj = std::ptrdiff_t(j + b) - 1;
                if (jj < 0 || jj >= std::ptrdiff_t(ny))
                  continue;
                for (std::size_t d = 0; d < 3; ++d) {
                  const std::ptrdiff_t tt = std::ptrdiff_t(t + d) - 1;
                  if (tt < 0 || tt >= std::ptrdiff_t(nt))
                    continue;
                  acc += layer.w(o, c, a, b, d) *
                         x.at(c, std::size_t(ii), std::size_t(jj),
                              std::size_t(tt));
                }
              }
            }
          out.at(o, i, j, t) = acc;
        }
  if (layer.leaky)
    for (auto &v : out.v)
      v = leaky_relu(v);
  return out;
}

Conv3dGrads conv3d_backward(const RealVolume &x, const Conv3dLayer &layer,
                            const RealVolume &pre_activation,
                            const RealVolume &upstream) {
  const std::size_t nx = x.nx, ny = x.ny, nt = x.nt;
  RealVolume g = upstream;
  if (layer.leaky)
    for (std::size_t i = 0; i < g.v.size(); ++i)
      g.v[i] *= leaky_relu_deriv(pre_activation.v[i]);

  Conv3dGrads grads;
  grads.input_grad = RealVolume(layer.in_ch, nx, ny, nt);
  grads.weight_grad.assign(layer.weights.size(), 0.0);
  grads.bias_grad.assign(layer.bias.size(), 0.0);

  for (std::size_t o = 0; o < layer.out_ch; ++o)
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t t = 0; t < nt; ++t) {
          const double gv = g.at(o, i, j, t);
          if (gv == 0.0)
            continue;
          grads.bias_grad[o] += gv;
          for (std::size_t c = 0; c < layer.in_ch; ++c)
            for (std::size_t a = 0; a < 3; ++a) {
              const std::ptrdiff_t ii = std::ptrdiff_t(i + a) - 1;
              if (ii < 0 || ii >= std::ptrdiff_t(nx))
                continue;
              for (std::size_t b = 0; b < 3; ++b) {
                const std::ptrdiff_t jj = std::ptrdiff_t(j + b) - 1;
                if (jj < 0 || jj >= std::ptrdiff_t(ny))
                  continue;
                for (std::size_t d = 0; d < 3; ++d) {
                  const std::ptrdiff_t tt = std::ptrdiff_t(t + d) - 1;
                  if (tt < 0 || tt >= std::ptrdiff_t(nt))
                    continue;
                  const std::size_t widx =
                      (((o * layer.in_ch + c) * 3 + a) * 3 + b) * 3 + d;
                  grads.weight_grad[widx] +=
                      gv * x.at(c, std::size_t(ii), std::size_t(jj),
                                std::size_t(tt));
                  grads.input_grad.at(c, std::size_t(ii), std::size_t(jj),
                                      std::size_t(tt)) +=
                      gv * layer.weights[widx];
                }
              }
            }
        }
  return grads;
}

CnnBlockParams CnnBlockParams::make(std::size_t hidden) {
  CnnBlockParams p;
  p.layers.emplace_back(4, hidden, true);
  p.layers.emplace_back(hidden, hidden, true);
  p.layers.emplace_back(hidden, 2, false);
  return p;
}

std::size_t CnnBlockParams::n_scalars() const {
  std::size_t n = 0;
  for (const auto &l : layers)
    n += l.weights.size() + l.bias.size();
  return n;
}

CnnBlockParams init_params(std::size_t hidden, std::uint64_t seed) {
  CnnBlockParams p = CnnBlockParams::make(hidden);
  Rng rng(seed);
  for (auto &layer : p.layers) {
    const double std_dev = std::sqrt(2.0 / (double(layer.in_ch) * 27.0));
    for (auto &w : layer.weights)
      w = std_dev * rng.normal();
    // biases stay zero
  }
  // Zero the output layer so a freshly initialised block is the identity on
  // the S track; the hidden layers start training as soon as the first
  // optimiser step makes the output layer nonzero.
  for (auto &w : p.layers.back().weights)
    w = 0.0;
  return p;
}

namespace {

RealVolume stack_channels(const ComplexTensor &x, const ComplexTensor &l) {
  const std::size_t nx = x.dim(0), ny = x.dim(1), nt = x.dim(2);
  RealVolume v(4, nx, ny, nt);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t t = 0; t < nt; ++t) {
        v.at(0, i, j, t) = x.at(i, j, t).real();
        v.at(1, i, j, t) = x.at(i, j, t).imag();
        v.at(2, i, j, t) = l.at(i, j, t).real();
        v.at(3, i, j, t) = l.at(i, j, t).imag();
      }
  return v;
}

} // namespace

ComplexTensor cnn_proximal_forward(const ComplexTensor &x_k,
                                   const ComplexTensor &l_next,
                                   const ComplexTensor &s_k,
                                   const CnnBlockParams &params,
                                   CnnTape *tape) {
  if (!x_k.same_dims(l_next) || !x_k.same_dims(s_k) || x_k.ndim() != 3)
    throw std::invalid_argument("cnn_proximal_forward: dims mismatch");
  const std::size_t nx = x_k.dim(0), ny = x_k.dim(1), nt = x_k.dim(2);

  RealVolume current = stack_channels(x_k, l_next);
  if (tape) {
    tape->input = current;
    tape->pre_activation.clear();
    tape->layer_output.clear();
  }
  for (const auto &layer : params.layers) {
    Conv3dLayer linear = layer;
    linear.leaky = false;
    RealVolume pre = conv3d_forward(current, linear);
    RealVolume post = pre;
    if (layer.leaky)
      for (auto &v : post.v)
        v = leaky_relu(v);
    if (tape) {
      tape->pre_activation.push_back(std::move(pre));
      tape->layer_output.push_back(post);
    }
    current = std::move(post);
  }

  ComplexTensor s_next = s_k;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t t = 0; t < nt; ++t)
        s_next.at(i, j, t) += cplx(current.at(0, i, j, t),
                                   current.at(1, i, j, t));
  return s_next;
}

CnnGrads cnn_proximal_backward(const CnnBlockParams &params,
                               const CnnTape &tape,
                               const ComplexTensor &upstream) {
  const std::size_t nx = tape.input.nx, ny = tape.input.ny,
                    nt = tape.input.nt;
  CnnGrads grads;
  grads.grad_x_k = ComplexTensor({nx, ny, nt});
  grads.grad_l_next = ComplexTensor({nx, ny, nt});
  grads.grad_s_k = upstream; // identity skip on the S track
  grads.grad_params.clear();

  // Residual output channels.
  RealVolume g(2, nx, ny, nt);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t t = 0; t < nt; ++t) {
        const cplx u = upstream.at(i, j, t);
        g.at(0, i, j, t) = u.real();
        g.at(1, i, j, t) = u.imag();
      }

  std::vector<std::vector<double>> layer_param_grads(params.layers.size());
  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const RealVolume &input =
        li == 0 ? tape.input : tape.layer_output[li - 1];
    Conv3dGrads cg = conv3d_backward(input, params.layers[li],
                                     tape.pre_activation[li], g);
    auto &pg = layer_param_grads[li];
    pg = std::move(cg.weight_grad);
    pg.insert(pg.end(), cg.bias_grad.begin(), cg.bias_grad.end());
    g = std::move(cg.input_grad);
  }
  for (auto &pg : layer_param_grads)
    grads.grad_params.insert(grads.grad_params.end(), pg.begin(), pg.end());

  // Input channel grads (the skip path only touches s_k).
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t t = 0; t < nt; ++t) {
        grads.grad_x_k.at(i, j, t) =
            cplx(g.at(0, i, j, t), g.at(1, i, j, t));
        grads.grad_l_next.at(i, j, t) =
            cplx(g.at(2, i, j, t), g.at(3, i, j, t));
      }
  return grads;
}

void cnn_pack(const CnnBlockParams &params, std::vector<double> &out) {
  for (const auto &l : params.layers) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
}

void cnn_unpack(CnnBlockParams &params, const double *&cursor) {
  for (auto &l : params.layers) {
    std::copy(cursor, cursor + l.weights.size(), l.weights.begin());
    cursor += l.weights.size();
    std::copy(cursor, cursor + l.bias.size(), l.bias.begin());
    cursor += l.bias.size();
  }
}

} // namespace lps
