#include "lps/lsnet.hpp"

#include <stdexcept>
#include <string>

namespace lps {

LsNetParams LsNetParams::init(int n_iter, std::size_t hidden,
                              std::uint64_t seed) {
  if (n_iter < 1)
    throw std::invalid_argument("LsNetParams: n_iter >= 1 required");
  LsNetParams p;
  p.n_iter = n_iter;
  p.hidden = hidden;
  p.beta.assign(n_iter, -2.0);
  p.gamma.assign(n_iter, 1.0);
  for (int k = 0; k < n_iter; ++k)
    p.cnn.push_back(init_params(hidden, seed + std::uint64_t(k)));
  return p;
}

LsNetParams LsNetParams::zeros(int n_iter, std::size_t hidden) {
  LsNetParams p = init(n_iter, hidden, 0);
  for (int k = 0; k < n_iter; ++k)
    p.cnn[k] = CnnBlockParams::make(hidden);
  return p;
}

std::size_t LsNetParams::n_scalars() const {
  std::size_t n = 0;
  for (const auto &c : cnn)
    n += 2 + c.n_scalars();
  return n;
}

std::vector<double> LsNetParams::to_flat() const {
  std::vector<double> flat;
  flat.reserve(n_scalars());
  for (int k = 0; k < n_iter; ++k) {
    flat.push_back(beta[k]);
    flat.push_back(gamma[k]);
    cnn_pack(cnn[k], flat);
  }
  return flat;
}

void LsNetParams::from_flat(const std::vector<double> &flat) {
  if (flat.size() != n_scalars())
    throw std::invalid_argument("LsNetParams::from_flat: size mismatch");
  const double *cursor = flat.data();
  for (int k = 0; k < n_iter; ++k) {
    beta[k] = *cursor++;
    gamma[k] = *cursor++;
    cnn_unpack(cnn[k], cursor);
  }
}

LsNetOutput lsnet_forward(const ComplexTensor &y, const EncodingOperator &op,
                          const LsNetParams &params, ForwardTape *tape) {
  const std::size_t nx = op.nx(), ny = op.ny();

  ComplexTensor X = adjoint(y, op);
  ComplexTensor L = X;
  ComplexTensor S = ComplexTensor::zeros_like(X);
  if (tape)
    tape->blocks.assign(std::size_t(params.n_iter), BlockTape{});

  for (int k = 0; k < params.n_iter; ++k) {
    BlockTape *bt = tape ? &tape->blocks[std::size_t(k)] : nullptr;
    if (bt) {
      bt->X_k = X;
      bt->S_k = S;
    }

    ComplexTensor L_next =
        uncasorati(lsvt(casorati(X - S), params.beta[std::size_t(k)],
                        bt ? &bt->svd_tape : nullptr),
                   nx, ny);
    if (!L_next.all_finite())
      throw std::runtime_error("lsnet_forward: NaN in low-rank layer of block " +
                               std::to_string(k));

    ComplexTensor S_next = cnn_proximal_forward(
        X, L_next, S, params.cnn[std::size_t(k)], bt ? &bt->cnn_tape : nullptr);
    if (!S_next.all_finite())
      throw std::runtime_error("lsnet_forward: NaN in sparse layer of block " +
                               std::to_string(k));

    ComplexTensor Z = L_next + S_next;
    ComplexTensor gF = grad_data_fidelity(Z, y, op);
    ComplexTensor X_next = Z - params.gamma[std::size_t(k)] * gF;
    if (!X_next.all_finite())
      throw std::runtime_error(
          "lsnet_forward: NaN in data-consistency layer of block " +
          std::to_string(k));

    if (bt) {
      bt->L_next = L_next;
      bt->grad_F = gF;
    }
    L = std::move(L_next);
    S = std::move(S_next);
    X = std::move(X_next);
  }
  return {std::move(X), std::move(L), std::move(S)};
}

std::vector<double> lsnet_backward(const ForwardTape &tape,
                                   const EncodingOperator &op,
                                   const LsNetParams &params,
                                   const ComplexTensor &grad_X_N) {
  if (tape.blocks.size() != std::size_t(params.n_iter))
    throw std::invalid_argument("lsnet_backward: tape/params mismatch");
  const std::size_t nx = op.nx(), ny = op.ny();

  std::vector<std::vector<double>> per_block(tape.blocks.size());

  ComplexTensor gX = grad_X_N;
  ComplexTensor gS = ComplexTensor::zeros_like(grad_X_N);

  for (std::size_t k = tape.blocks.size(); k-- > 0;) {
    const BlockTape &bt = tape.blocks[k];

    // X_{k+1} = Z - gamma*A*(A Z - y): gamma grad is -Re<gX, grad_F>;
    // the image-input adjoint is (I - gamma*A*A).
    const double gamma_grad = -inner(gX, bt.grad_F).real();
    ComplexTensor AAg = adjoint(forward(gX, op), op);
    ComplexTensor Z_bar = gX - params.gamma[k] * AAg;

    ComplexTensor L_bar = Z_bar;
    ComplexTensor S_next_bar = Z_bar + gS;

    CnnGrads cg =
        cnn_proximal_backward(params.cnn[k], bt.cnn_tape, S_next_bar);
    L_bar += cg.grad_l_next;

    LsvtGrads lg = lsvt_backward(bt.svd_tape, casorati(L_bar));
    ComplexTensor M_bar = uncasorati(lg.input_grad, nx, ny);

    gX = cg.grad_x_k + M_bar;
    gS = cg.grad_s_k - M_bar;

    auto &flat = per_block[k];
    flat.push_back(lg.beta_grad);
    flat.push_back(gamma_grad);
    flat.insert(flat.end(), cg.grad_params.begin(), cg.grad_params.end());
  }

  std::vector<double> grads;
  grads.reserve(params.n_scalars());
  for (const auto &flat : per_block)
    grads.insert(grads.end(), flat.begin(), flat.end());
  return grads;
}

MseLoss loss_mse(const ComplexTensor &x, const ComplexTensor &ref) {
  if (!x.same_dims(ref))
    throw std::invalid_argument("loss_mse: dimension mismatch");
  MseLoss loss;
  loss.grad = x - ref;
  const double n = norm2(loss.grad);
  loss.value = n * n;
  loss.grad *= 2.0;
  return loss;
}

} // namespace lps
