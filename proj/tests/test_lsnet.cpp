#include <doctest.h>

#include <cmath>

#include "lps/lsnet.hpp"
#include "lps/phantom.hpp"
#include "lps/proximal.hpp"
#include "oracles.hpp"

using namespace lps;

namespace {

// Straight-line re-implementation of the forward pass, no tape.
LsNetOutput forward_reference(const ComplexTensor &y,
                              const EncodingOperator &op,
                              const LsNetParams &p) {
  ComplexTensor X = adjoint(y, op);
  ComplexTensor L = X;
  ComplexTensor S = ComplexTensor::zeros_like(X);
  for (int k = 0; k < p.n_iter; ++k) {
    L = uncasorati(lsvt(casorati(X - S), p.beta[std::size_t(k)], nullptr),
                   op.nx(), op.ny());
    S = cnn_proximal_forward(X, L, S, p.cnn[std::size_t(k)], nullptr);
    const ComplexTensor Z = L + S;
    X = Z - p.gamma[std::size_t(k)] * grad_data_fidelity(Z, y, op);
  }
  return LsNetOutput{X, L, S};
}

TrainSample tiny_sample(std::uint64_t seed, bool full_mask) {
  PhantomSpec spec;
  spec.nx = spec.ny = 8;
  spec.nt = 4;
  spec.background_rank = 2;
  spec.n_blobs = 1;
  spec.seed = seed;
  const MaskConfig mask{full_mask ? 1.0 : 2.0, 2, seed + 9};
  return make_sample(spec, mask, CoilConfig{}, 0.0);
}

} // namespace

TEST_CASE("full sampling with passthrough parameters recovers exactly") {
  const TrainSample s = tiny_sample(1, true);
  LsNetParams p = LsNetParams::zeros(1, 2);
  p.beta[0] = -30.0; // threshold ~ 0
  p.gamma[0] = 1.0;
  const LsNetOutput out = lsnet_forward(s.y, s.op, p, nullptr);
  CHECK(norm2(out.X - s.x_ref) <= 1e-6 * norm2(s.x_ref));
}

TEST_CASE("zero data gives zero output with zero CNNs") {
  const TrainSample s = tiny_sample(2, false);
  const ComplexTensor y = ComplexTensor::zeros_like(s.y);
  const LsNetParams p = LsNetParams::zeros(2, 2);
  const LsNetOutput out = lsnet_forward(y, s.op, p, nullptr);
  CHECK(norm2(out.X) == 0.0);
  CHECK(norm2(out.L) == 0.0);
  CHECK(norm2(out.S) == 0.0);
}

TEST_CASE("forward matches a straight-line re-implementation") {
  const TrainSample s = tiny_sample(3, false);
  const LsNetParams p = LsNetParams::init(2, 2, 17);
  const LsNetOutput got = lsnet_forward(s.y, s.op, p, nullptr);
  const LsNetOutput want = forward_reference(s.y, s.op, p);
  CHECK(norm2(got.X - want.X) <= 1e-12);
  CHECK(norm2(got.L - want.L) <= 1e-12);
  CHECK(norm2(got.S - want.S) <= 1e-12);

  const LsNetOutput again = lsnet_forward(s.y, s.op, p, nullptr);
  for (std::size_t i = 0; i < got.X.size(); ++i)
    CHECK(again.X[i] == got.X[i]);
}

TEST_CASE("tape replays the data-consistency identity") {
  const TrainSample s = tiny_sample(4, false);
  const LsNetParams p = LsNetParams::init(2, 2, 23);
  ForwardTape tape;
  const LsNetOutput out = lsnet_forward(s.y, s.op, p, &tape);
  REQUIRE(tape.blocks.size() == 2);
  const ComplexTensor Z = out.L + out.S;
  const ComplexTensor replay =
      Z - p.gamma[1] * grad_data_fidelity(Z, s.y, s.op);
  CHECK(norm2(out.X - replay) <= 1e-10);
}

TEST_CASE("loss_mse values and gradient") {
  ComplexTensor x({1}), ref({1});
  x[0] = cplx(1, 1);
  const MseLoss l = loss_mse(x, ref);
  CHECK(l.value == doctest::Approx(2.0));
  CHECK(l.grad[0] == cplx(2.0, 2.0));
  const MseLoss zero = loss_mse(ref, ref);
  CHECK(zero.value == 0.0);
  CHECK(norm2(zero.grad) == 0.0);
}

TEST_CASE("gamma gradient matches closed form from the tape") {
  const TrainSample s = tiny_sample(5, false);
  const LsNetParams p = LsNetParams::init(1, 2, 31);
  ForwardTape tape;
  const LsNetOutput out = lsnet_forward(s.y, s.op, p, &tape);
  const MseLoss loss = loss_mse(out.X, s.x_ref);
  const std::vector<double> g = lsnet_backward(tape, s.op, p, loss.grad);
  // One block: dLoss/dgamma = -Re<grad_X, grad_F> with grad_X = loss.grad.
  const double want = -inner(loss.grad, tape.blocks[0].grad_F).real();
  // gamma is the second scalar in the block's flat layout.
  CHECK(std::abs(g[1] - want) <= 1e-12 * std::max(1.0, std::abs(want)));
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  const TrainSample s = tiny_sample(6, false);
  const LsNetParams p = LsNetParams::init(2, 2, 37);
  ForwardTape tape;
  (void)lsnet_forward(s.y, s.op, p, &tape);
  const std::vector<double> g =
      lsnet_backward(tape, s.op, p, ComplexTensor::zeros_like(s.x_ref));
  for (double v : g)
    CHECK(v == 0.0);
}

TEST_CASE("end-to-end gradients match finite differences (spot check)") {
  const TrainSample s = tiny_sample(7, false);
  LsNetParams p = LsNetParams::init(2, 2, 41);
  {
    // Kick every parameter off its init value so no gradient is trivially
    // zero (the output layers start at zero).
    std::vector<double> flat0 = p.to_flat();
    Rng kick(43);
    for (auto &v : flat0)
      v += 0.05 * kick.normal();
    p.from_flat(flat0);
  }

  ForwardTape tape;
  const LsNetOutput out = lsnet_forward(s.y, s.op, p, &tape);
  const MseLoss loss = loss_mse(out.X, s.x_ref);
  const std::vector<double> grads = lsnet_backward(tape, s.op, p, loss.grad);

  std::vector<double> flat = p.to_flat();
  REQUIRE(grads.size() == flat.size());
  const auto eval = [&](std::size_t i, double delta) {
    std::vector<double> pert = flat;
    pert[i] += delta;
    LsNetParams q = p;
    q.from_flat(pert);
    const LsNetOutput o = lsnet_forward(s.y, s.op, q, nullptr);
    return loss_mse(o.X, s.x_ref).value;
  };
  const double h = 1e-5;

  // All betas and gammas plus a random subset of CNN weights; the full
  // sweep lives in the acceptance suite.
  std::vector<std::size_t> idx;
  const std::size_t per_block = flat.size() / 2;
  for (std::size_t k = 0; k < 2; ++k) {
    idx.push_back(k * per_block);     // beta
    idx.push_back(k * per_block + 1); // gamma
  }
  Rng pick(51);
  for (int t = 0; t < 24; ++t)
    idx.push_back(pick.below(flat.size()));
  for (std::size_t i : idx) {
    const double fd = (eval(i, h) - eval(i, -h)) / (2 * h);
    CHECK(oracle::grad_err(grads[i], fd) <= 1e-4);
  }
}

TEST_CASE("flat parameter layout round trips") {
  LsNetParams p = LsNetParams::init(3, 2, 5);
  const std::vector<double> flat = p.to_flat();
  CHECK(flat.size() == p.n_scalars());
  LsNetParams q = LsNetParams::zeros(3, 2);
  q.from_flat(flat);
  CHECK(q.to_flat() == flat);
}
