#include "lps/proximal.hpp"

#include <cmath>
#include <stdexcept>

#include "lps/fft.hpp"

namespace lps {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

ComplexTensor reconstruct(const SvdFactors &f, const Eigen::VectorXd &vals) {
  const Eigen::MatrixXcd out =
      f.U * vals.asDiagonal() * f.V.adjoint();
  return from_matrix(out);
}

} // namespace

ComplexTensor svt(const ComplexTensor &M, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("svt: tau must be finite and >= 0");
  const SvdFactors f = svd(M);
  Eigen::VectorXd vals = f.sigma;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals(i) = std::max(vals(i) - tau, 0.0);
  return reconstruct(f, vals);
}

ComplexTensor lsvt(const ComplexTensor &M, double beta, LsvtTape *tape) {
  const SvdFactors f = svd(M);
  const double sigma1 = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  const double tau = sigmoid(beta) * sigma1;
  Eigen::VectorXd vals = f.sigma;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals(i) = std::max(vals(i) - tau, 0.0);

  if (tape) {
    tape->factors = f;
    tape->beta = beta;
    tape->rows = M.dim(0);
    tape->cols = M.dim(1);
    tape->gap_warning = false;
    for (Eigen::Index i = 0; i + 1 < f.sigma.size(); ++i)
      if (f.sigma(i) - f.sigma(i + 1) < 1e-9 * sigma1)
        tape->gap_warning = true;
  }
  return reconstruct(f, vals);
}

LsvtGrads lsvt_backward(const LsvtTape &tape, const ComplexTensor &upstream) {
  const SvdFactors &f = tape.factors;
  const Eigen::Index r = f.sigma.size();
  const Eigen::MatrixXcd G = as_matrix(upstream);
  if (G.rows() != Eigen::Index(tape.rows) ||
      G.cols() != Eigen::Index(tape.cols))
    throw std::invalid_argument("lsvt_backward: upstream dims mismatch");

  const double sigma1 = r > 0 ? f.sigma(0) : 0.0;
  LsvtGrads grads;
  grads.input_grad = ComplexTensor({tape.rows, tape.cols});
  if (sigma1 == 0.0)
    return grads; // zero matrix: both gradients vanish

  const double s = sigmoid(tape.beta);
  const double sprime = s * (1.0 - s);
  const double tau = s * sigma1;

  // Thresholded values and the active set (strict inequality at the tie).
  Eigen::VectorXd h(r);
  std::vector<bool> active(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    active[i] = f.sigma(i) - tau > 0.0;
    h(i) = active[i] ? f.sigma(i) - tau : 0.0;
  }

  const Eigen::MatrixXcd K = f.U.adjoint() * G * f.V; // r x r

  // d(loss)/d(beta) = Re<G, U * diag(-s'(b)*sigma1 on active set) * V^H>.
  for (Eigen::Index i = 0; i < r; ++i)
    if (active[i])
      grads.beta_grad += -sprime * sigma1 * K(i, i).real();

  // Jacobian of h w.r.t. sigma: dh_i/dsigma_j =
  //   1{active_i} * (delta_ij - s * delta_j1).
  Eigen::VectorXd sigma_bar = Eigen::VectorXd::Zero(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!active[i])
      continue;
    const double ki = K(i, i).real();
    sigma_bar(i) += ki;
    sigma_bar(0) -= s * ki;
  }

  const double eps = 1e-9 * sigma1 * sigma1;
  Eigen::MatrixXcd core = Eigen::MatrixXcd::Zero(r, r);
  for (Eigen::Index p = 0; p < r; ++p) {
    for (Eigen::Index q = 0; q < r; ++q) {
      if (p == q)
        continue;
      double d = f.sigma(q) * f.sigma(q) - f.sigma(p) * f.sigma(p);
      d += (d >= 0.0 ? eps : -eps);
      const double a = (h(q) * f.sigma(q) - h(p) * f.sigma(p)) / d;
      const double b = (h(q) * f.sigma(p) - h(p) * f.sigma(q)) / d;
      core(p, q) += a * K(p, q);
      core(q, p) += b * std::conj(K(p, q));
    }
  }
  const double sigma_floor = 1e-300;
  for (Eigen::Index p = 0; p < r; ++p) {
    const double ratio = h(p) / std::max(f.sigma(p), sigma_floor);
    core(p, p) += sigma_bar(p) + cplx(0.0, ratio * K(p, p).imag());
  }

  Eigen::MatrixXcd grad = f.U * core * f.V.adjoint();

  // Components orthogonal to the computed singular subspaces.
  Eigen::VectorXd ratio(r);
  for (Eigen::Index p = 0; p < r; ++p)
    ratio(p) = h(p) / std::max(f.sigma(p), sigma_floor);
  const Eigen::MatrixXcd GV = G * f.V;
  const Eigen::MatrixXcd UhG = f.U.adjoint() * G;
  grad += (GV - f.U * (f.U.adjoint() * GV)) * ratio.asDiagonal() *
          f.V.adjoint();
  grad += f.U * ratio.asDiagonal() * (UhG - (UhG * f.V) * f.V.adjoint());

  grads.input_grad = from_matrix(grad);
  return grads;
}

ComplexTensor soft_threshold_complex(const ComplexTensor &x, double tau) {
  if (!(tau >= 0.0))
    throw std::invalid_argument("soft_threshold_complex: tau >= 0 required");
  ComplexTensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mag = std::abs(out[i]);
    out[i] = mag <= tau ? cplx(0.0, 0.0) : out[i] * ((mag - tau) / mag);
  }
  return out;
}

ComplexTensor temporal_fourier_prox(const ComplexTensor &s, double tau) {
  return ifft_time(soft_threshold_complex(fft_time(s), tau));
}

} // namespace lps
