#pragma once

#include <string>
#include <vector>

#include "lps/encoding.hpp"
#include "lps/tensor.hpp"

namespace lps {

struct SolverConfig {
  double lambda_L = 0.3;
  double lambda_S = 0.03;
  double rho = 1.0;
  double eta = 1.0; // gamma = 1/(1 + eta*rho)
  int max_iter = 200;
  double tol = 0.0; // stop when ||dL||^2 + ||dS||^2 < tol^2
  bool log_penalty = false;

  double gamma() const { return 1.0 / (1.0 + eta * rho); }
  void validate() const;
};

struct SolverState {
  ComplexTensor L, S, X;
  int k = 0;
  std::vector<double> penalty_history;   // J_k per iteration (when logged)
  std::vector<double> increment_history; // ||dL||^2 + ||dS||^2 per step
  bool aborted_nan = false;
};

/// Alternating linearized L+S solver with SVT low-rank prox and
/// temporal-Fourier l1 sparse prox.
SolverState lps_solve(const ComplexTensor &y, const EncodingOperator &op,
                      const SolverConfig &cfg);

/// Linearized penalty around X_hat_prev:
/// F(Xh) + Re<grad F(Xh), L+S-Xh> + lamL*||L||_* + lamS*||F_t S||_1
/// + rho/2*||L+S-Xh||^2.
double penalty_value(const ComplexTensor &L, const ComplexTensor &S,
                     const ComplexTensor &X_hat_prev, const ComplexTensor &y,
                     const EncodingOperator &op, const SolverConfig &cfg);

struct ConvergenceReport {
  bool pass = false;
  std::vector<int> violations;
  double tail_median = 0.0;
  double tail_slope = 0.0;
  std::string summary;
};

/// Sufficient-decrease check: flags every k where
/// J_k - J_{k+1} < mu*(||dL||^2+||dS||^2) - 1e-9, mu = min(rho, sigma_est)/2
/// with the diagnostic convention sigma_est = rho.
ConvergenceReport check_sufficient_decrease(const SolverState &state,
                                            const SolverConfig &cfg);

/// Vanishing-increment check: the last-10% median of the increment sequence
/// must be below 1e-6 with non-positive linear trend.
ConvergenceReport check_vanishing_increments(const SolverState &state);

} // namespace lps
