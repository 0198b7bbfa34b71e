#include <doctest.h>

#include <cmath>

#include "lps/proximal.hpp"
#include "lps/svd.hpp"
#include "oracles.hpp"

using namespace lps;

namespace {

ComplexTensor tensor_from(const Eigen::MatrixXcd &M) { return from_matrix(M); }

double diag_singular(const ComplexTensor &t, std::size_t i) {
  return std::abs(t.at(i, i));
}

} // namespace

TEST_CASE("svt with tau=0 reproduces the matrix") {
  Rng rng(2);
  const Eigen::MatrixXcd M = oracle::random_matrix(5, 4, rng);
  const ComplexTensor out = svt(tensor_from(M), 0.0);
  CHECK((as_matrix(out) - M).norm() <= 1e-12 * M.norm());
}

TEST_CASE("svt on diag(3,1)") {
  ComplexTensor m({2, 2});
  m.at(0, 0) = 3;
  m.at(1, 1) = 1;
  const ComplexTensor out = svt(m, 2.0);
  CHECK(std::abs(out.at(0, 0) - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(out.at(0, 1)) < 1e-12);
  CHECK(std::abs(out.at(1, 0)) < 1e-12);
  CHECK(std::abs(out.at(1, 1)) < 1e-12);
}

TEST_CASE("svt singular values match independent reference") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index mrows = 2 + Eigen::Index(rng.below(63)),
                       ncols = 2 + Eigen::Index(rng.below(15));
    const Eigen::MatrixXcd M = oracle::random_matrix(mrows, ncols, rng);
    const std::vector<double> ref = oracle::jacobi_singular_values(M);
    const double tau = 0.5 * ref[1];
    const ComplexTensor out = svt(tensor_from(M), tau);
    const std::vector<double> got =
        oracle::jacobi_singular_values(as_matrix(out));
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(std::abs(got[i] - std::max(ref[i] - tau, 0.0)) <= 1e-9);
  }
}

TEST_CASE("svt is nonexpansive") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXcd M = oracle::random_matrix(6, 5, rng);
    const Eigen::MatrixXcd N = oracle::random_matrix(6, 5, rng);
    const double tau = rng.uniform(0.0, 3.0);
    const ComplexTensor a = svt(tensor_from(M), tau);
    const ComplexTensor b = svt(tensor_from(N), tau);
    CHECK((as_matrix(a) - as_matrix(b)).norm() <= (M - N).norm() + 1e-12);
  }
}

TEST_CASE("lsvt of zero is zero") {
  const ComplexTensor m({3, 3});
  LsvtTape tape;
  const ComplexTensor out = lsvt(m, -2.0, &tape);
  CHECK(norm2(out) == 0.0);
}

TEST_CASE("lsvt with beta=-2 on diag(10,2,1)") {
  ComplexTensor m({3, 3});
  m.at(0, 0) = 10;
  m.at(1, 1) = 2;
  m.at(2, 2) = 1;
  const ComplexTensor out = lsvt(m, -2.0, nullptr);
  const double s = 1.0 / (1.0 + std::exp(2.0)); // 0.119203...
  CHECK(diag_singular(out, 0) == doctest::Approx(10 - 10 * s).epsilon(1e-10));
  CHECK(diag_singular(out, 1) == doctest::Approx(2 - 10 * s).epsilon(1e-8));
  CHECK(diag_singular(out, 2) < 1e-12);
  CHECK(out.at(0, 0).real() == doctest::Approx(8.80797).epsilon(1e-5));
  CHECK(out.at(1, 1).real() == doctest::Approx(0.80797).epsilon(1e-4));
}

TEST_CASE("lsvt keeps a rank-1 remainder even for large beta") {
  ComplexTensor m({2, 2});
  m.at(0, 0) = 1;
  m.at(1, 1) = 0.5;
  const ComplexTensor out = lsvt(m, 20.0, nullptr);
  const double expect = 1.0 - sigmoid(20.0); // ~2.06e-9
  CHECK(out.at(0, 0).real() == doctest::Approx(expect).epsilon(1e-6));
  CHECK(std::abs(out.at(1, 1)) < 1e-15);
}

TEST_CASE("lsvt_backward of zero upstream is zero") {
  Rng rng(4);
  const Eigen::MatrixXcd M = oracle::random_matrix(4, 3, rng);
  LsvtTape tape;
  (void)lsvt(tensor_from(M), -1.0, &tape);
  const LsvtGrads g = lsvt_backward(tape, ComplexTensor({4, 3}));
  CHECK(g.beta_grad == 0.0);
  CHECK(norm2(g.input_grad) == 0.0);
}

TEST_CASE("lsvt beta gradient matches finite differences") {
  Rng rng(11);
  const Eigen::MatrixXcd M = oracle::random_matrix(6, 4, rng);
  const ComplexTensor Mt = tensor_from(M);
  const ComplexTensor G = oracle::random_tensor({6, 4}, rng);
  const double beta = -0.7;

  LsvtTape tape;
  (void)lsvt(Mt, beta, &tape);
  const LsvtGrads g = lsvt_backward(tape, G);

  const auto obj = [&](double b) {
    return inner(G, lsvt(Mt, b, nullptr)).real();
  };
  const double fd = oracle::central_diff(obj, beta, 1e-6);
  CHECK(oracle::rel_err(g.beta_grad, fd) <= 1e-5);
}

TEST_CASE("lsvt input gradient matches finite differences") {
  Rng rng(13);
  const Eigen::MatrixXcd M = oracle::with_singular_values({3, 2, 1}, rng);
  ComplexTensor Mt = tensor_from(M);
  const ComplexTensor G = oracle::random_tensor({3, 3}, rng);
  const double beta = -1.0;

  LsvtTape tape;
  (void)lsvt(Mt, beta, &tape);
  const LsvtGrads g = lsvt_backward(tape, G);

  const double h = 1e-6;
  for (std::size_t idx = 0; idx < Mt.size(); ++idx)
    for (int part = 0; part < 2; ++part) {
      const auto eval = [&](double delta) {
        ComplexTensor z = Mt;
        z[idx] += part ? cplx(0, delta) : cplx(delta, 0);
        return inner(G, lsvt(z, beta, nullptr)).real();
      };
      const double fd = (eval(h) - eval(-h)) / (2 * h);
      const double an =
          part ? g.input_grad[idx].imag() : g.input_grad[idx].real();
      CHECK(oracle::rel_err(an, fd) <= 1e-4);
    }
}

TEST_CASE("lsvt gap warning on degenerate spectra") {
  Rng rng(19);
  const Eigen::MatrixXcd M = oracle::with_singular_values({2, 2, 1}, rng);
  LsvtTape tape;
  (void)lsvt(tensor_from(M), -2.0, &tape);
  CHECK(tape.gap_warning);
  const LsvtGrads g = lsvt_backward(tape, oracle::random_tensor({3, 3}, rng));
  CHECK(g.input_grad.all_finite());
}

TEST_CASE("soft_threshold_complex") {
  ComplexTensor x({3});
  x[0] = cplx(3, 4);
  x[1] = cplx(0.5, 0);
  x[2] = cplx(0, 0);
  const ComplexTensor id = soft_threshold_complex(x, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(id[i] == x[i]);
  const ComplexTensor out = soft_threshold_complex(x, 2.0);
  CHECK(std::abs(out[0] - cplx(1.8, 2.4)) < 1e-14);
  CHECK(out[1] == cplx(0.0, 0.0)); // |v| <= tau
  CHECK(out[2] == cplx(0.0, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(out[i]) <= std::abs(x[i]) + 1e-15);
}

TEST_CASE("temporal_fourier_prox hand case") {
  ComplexTensor s({1, 1, 2});
  s.at(0, 0, 0) = 2;
  s.at(0, 0, 1) = 0;
  const double tau = std::sqrt(2.0) / 2.0;
  const ComplexTensor out = temporal_fourier_prox(s, tau);
  CHECK(std::abs(out.at(0, 0, 0) - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(out.at(0, 0, 1)) < 1e-12);

  Rng rng(23);
  const ComplexTensor r = oracle::random_tensor({3, 3, 4}, rng);
  const ComplexTensor same = temporal_fourier_prox(r, 0.0);
  for (std::size_t i = 0; i < r.size(); ++i)
    CHECK(std::abs(same[i] - r[i]) < 1e-12);
  const ComplexTensor zero = temporal_fourier_prox(r, 1e9);
  CHECK(norm2(zero) < 1e-12);
  CHECK(norm2(temporal_fourier_prox(r, 0.3)) <= norm2(r) + 1e-12);
}
