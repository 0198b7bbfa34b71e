#include "lps/training.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lps/rng.hpp"

namespace lps {

void adam_step(std::vector<double> &params, const std::vector<double> &grads,
               AdamState &state, double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  for (double g : grads)
    if (!std::isfinite(g))
      throw std::invalid_argument("adam_step: non-finite gradient");

  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, double(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] =
        state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

void TrainConfig::validate() const {
  if (epochs < 0)
    throw std::invalid_argument("TrainConfig: epochs >= 0 required");
  if (start_epoch < 0 || start_epoch > epochs)
    throw std::invalid_argument("TrainConfig: start_epoch in [0, epochs]");
  if (!(lr0 > 0.0))
    throw std::invalid_argument("TrainConfig: lr0 > 0 required");
  if (!(decay > 0.0 && decay <= 1.0))
    throw std::invalid_argument("TrainConfig: decay in (0,1] required");
  if (batch_size != 1)
    throw std::invalid_argument("TrainConfig: only batch_size 1 is supported");
}

double lr_at_epoch(int epoch, const TrainConfig &cfg) {
  if (epoch < 0)
    throw std::invalid_argument("lr_at_epoch: epoch >= 0 required");
  return cfg.lr0 * std::pow(cfg.decay, double(epoch));
}

TrainRecord train(LsNetParams &model, const std::vector<TrainSample> &data,
                  const TrainConfig &cfg, AdamState *resume_state) {
  cfg.validate();
  if (data.empty())
    throw std::invalid_argument("train: dataset is empty");

  TrainRecord record;
  std::vector<double> flat = model.to_flat();
  AdamState local_state(flat.size());
  AdamState &state = resume_state ? *resume_state : local_state;
  if (state.m.size() != flat.size())
    throw std::invalid_argument("train: resume state size mismatch");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = cfg.start_epoch; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at_epoch(epoch, cfg);
    if (cfg.shuffle)
      for (std::size_t i = 0; i + 1 < order.size(); ++i)
        std::swap(order[i], order[i + rng.below(order.size() - i)]);

    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const TrainSample &sample = data[idx];
      ForwardTape tape;
      const LsNetOutput out =
          lsnet_forward(sample.y, sample.op, model, &tape);
      const MseLoss loss = loss_mse(out.X, sample.x_ref);
      loss_sum += loss.value;
      const std::vector<double> grads =
          lsnet_backward(tape, sample.op, model, loss.grad);
      adam_step(flat, grads, state, lr);
      model.from_flat(flat);
    }
    const double mean_loss = loss_sum / double(data.size());
    record.epoch_loss.push_back(mean_loss);
    record.epoch_lr.push_back(lr);

    if (epoch > 0 && mean_loss > 100.0 * record.epoch_loss.front()) {
      record.diverged = true;
      break;
    }
  }
  return record;
}

} // namespace lps
