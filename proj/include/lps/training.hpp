#pragma once

#include <cstdint>
#include <vector>

#include "lps/encoding.hpp"
#include "lps/lsnet.hpp"

namespace lps {

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// Standard bias-corrected Adam update, in place. Throws on NaN gradients.
void adam_step(std::vector<double> &params, const std::vector<double> &grads,
               AdamState &state, double lr);

struct TrainConfig {
  int epochs = 50;
  int start_epoch = 0; // resume point; lr schedule stays aligned
  double lr0 = 0.001;
  double decay = 0.95;
  int batch_size = 1;
  std::uint64_t seed = 0;
  bool shuffle = false;

  void validate() const;
};

double lr_at_epoch(int epoch, const TrainConfig &cfg);

struct TrainSample {
  ComplexTensor y;
  EncodingOperator op;
  ComplexTensor x_ref;
};

struct TrainRecord {
  std::vector<double> epoch_loss; // mean loss per epoch
  std::vector<double> epoch_lr;
  bool diverged = false;
};

/// Sequential per-sample training (batch 1): forward, MSE loss, backward,
/// Adam step. Deterministic given seed and sample order.
TrainRecord train(LsNetParams &model, const std::vector<TrainSample> &data,
                  const TrainConfig &cfg, AdamState *resume_state = nullptr);

} // namespace lps
