#include "lps/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lps/fft.hpp"
#include "lps/proximal.hpp"

namespace lps {

void SolverConfig::validate() const {
  if (!(lambda_L > 0.0) || !(lambda_S > 0.0))
    throw std::invalid_argument("SolverConfig: lambda_L, lambda_S must be > 0");
  if (!(rho > 0.0) || !(eta > 0.0))
    throw std::invalid_argument("SolverConfig: rho, eta must be > 0");
  if (max_iter < 0)
    throw std::invalid_argument("SolverConfig: max_iter must be >= 0");
  const double g = gamma();
  if (!(g > 0.0 && g <= 1.0))
    throw std::invalid_argument("SolverConfig: gamma must lie in (0,1]");
}

namespace {

double nuclear_norm(const ComplexTensor &L) {
  return svd(casorati(L)).sigma.sum();
}

double temporal_l1(const ComplexTensor &S) {
  const ComplexTensor f = fft_time(S);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += std::abs(f[i]);
  return acc;
}

double fidelity(const ComplexTensor &x, const ComplexTensor &y,
                const EncodingOperator &op) {
  ComplexTensor r = forward(x, op);
  r -= y;
  const double n = norm2(r);
  return 0.5 * n * n;
}

double logged_penalty(const ComplexTensor &L, const ComplexTensor &S,
                      const ComplexTensor &y, const EncodingOperator &op,
                      const SolverConfig &cfg) {
  // penalty_value at X_hat = L+S: linear and quadratic coupling terms vanish.
  return fidelity(L + S, y, op) + cfg.lambda_L * nuclear_norm(L) +
         cfg.lambda_S * temporal_l1(S);
}

} // namespace

SolverState lps_solve(const ComplexTensor &y, const EncodingOperator &op,
                      const SolverConfig &cfg) {
  cfg.validate();
  const double gamma = cfg.gamma();

  SolverState st;
  st.L = adjoint(y, op);
  st.S = ComplexTensor::zeros_like(st.L);
  st.X = st.L;

  const std::size_t nx = op.nx(), ny = op.ny();

  for (st.k = 0; st.k < cfg.max_iter; ++st.k) {
    if (cfg.log_penalty)
      st.penalty_history.push_back(logged_penalty(st.L, st.S, y, op, cfg));

    ComplexTensor L_next = uncasorati(
        svt(casorati(st.X - st.S), cfg.lambda_L / cfg.rho), nx, ny);
    ComplexTensor S_next =
        temporal_fourier_prox(st.X - L_next, cfg.lambda_S / cfg.rho);
    ComplexTensor Z = L_next + S_next;
    ComplexTensor X_next = Z - gamma * grad_data_fidelity(Z, y, op);

    if (!X_next.all_finite() || !L_next.all_finite() || !S_next.all_finite()) {
      st.aborted_nan = true;
      return st;
    }

    const double dL = norm2(L_next - st.L);
    const double dS = norm2(S_next - st.S);
    const double inc = dL * dL + dS * dS;
    st.increment_history.push_back(inc);

    st.L = std::move(L_next);
    st.S = std::move(S_next);
    st.X = std::move(X_next);

    if (cfg.tol > 0.0 && inc < cfg.tol * cfg.tol) {
      ++st.k;
      break;
    }
  }
  if (cfg.log_penalty)
    st.penalty_history.push_back(logged_penalty(st.L, st.S, y, op, cfg));
  return st;
}

double penalty_value(const ComplexTensor &L, const ComplexTensor &S,
                     const ComplexTensor &X_hat_prev, const ComplexTensor &y,
                     const EncodingOperator &op, const SolverConfig &cfg) {
  const ComplexTensor grad = grad_data_fidelity(X_hat_prev, y, op);
  const ComplexTensor diff = L + S - X_hat_prev;
  const double quad = norm2(diff);
  return fidelity(X_hat_prev, y, op) + inner(grad, diff).real() +
         cfg.lambda_L * nuclear_norm(L) + cfg.lambda_S * temporal_l1(S) +
         0.5 * cfg.rho * quad * quad;
}

ConvergenceReport check_sufficient_decrease(const SolverState &state,
                                            const SolverConfig &cfg) {
  ConvergenceReport report;
  if (state.penalty_history.size() < 2 ||
      state.increment_history.size() + 1 != state.penalty_history.size()) {
    report.summary = "sufficient-decrease: penalty logging was not enabled";
    return report;
  }
  const double sigma_est = cfg.rho; // diagnostic convention, not a proof
  const double mu = 0.5 * std::min(cfg.rho, sigma_est);
  for (std::size_t k = 0; k < state.increment_history.size(); ++k) {
    const double decrease =
        state.penalty_history[k] - state.penalty_history[k + 1];
    if (decrease < mu * state.increment_history[k] - 1e-9)
      report.violations.push_back(int(k));
  }
  report.pass = report.violations.empty();
  std::ostringstream os;
  os << "sufficient-decrease: " << report.violations.size()
     << " violation(s) over " << state.increment_history.size()
     << " iterations (mu=" << mu << ", diagnostic, not proof)";
  report.summary = os.str();
  return report;
}

ConvergenceReport check_vanishing_increments(const SolverState &state) {
  ConvergenceReport report;
  const auto &inc = state.increment_history;
  if (inc.empty()) {
    report.pass = true;
    report.summary = "vanishing-increments: empty run, trivially converged";
    return report;
  }
  const std::size_t tail_len = std::max<std::size_t>(1, inc.size() / 10);
  std::vector<double> tail(inc.end() - tail_len, inc.end());

  std::vector<double> sorted = tail;
  std::sort(sorted.begin(), sorted.end());
  report.tail_median = sorted.size() % 2 == 1
                           ? sorted[sorted.size() / 2]
                           : 0.5 * (sorted[sorted.size() / 2 - 1] +
                                    sorted[sorted.size() / 2]);

  // Least-squares slope of the tail against iteration index.
  double slope = 0.0;
  if (tail.size() > 1) {
    const double n = double(tail.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
      sx += double(i);
      sy += tail[i];
      sxx += double(i) * double(i);
      sxy += double(i) * tail[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  report.tail_slope = slope;
  report.pass = report.tail_median < 1e-6 && slope <= 0.0;

  std::ostringstream os;
  os << "vanishing-increments: tail median " << report.tail_median
     << ", trend slope " << slope << " -> " << (report.pass ? "pass" : "fail");
  report.summary = os.str();
  return report;
}

} // namespace lps
