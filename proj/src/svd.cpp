#include "lps/svd.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace lps {

Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>>
as_matrix(const ComplexTensor &m) {
  if (m.ndim() != 2)
    throw std::invalid_argument("as_matrix expects a 2-dim tensor");
  return {m.data(), static_cast<Eigen::Index>(m.dim(0)),
          static_cast<Eigen::Index>(m.dim(1))};
}

ComplexTensor from_matrix(const Eigen::MatrixXcd &m) {
  ComplexTensor out({static_cast<std::size_t>(m.rows()),
                     static_cast<std::size_t>(m.cols())});
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out.at(i, j) = m(i, j);
  return out;
}

SvdFactors svd(const Eigen::MatrixXcd &M) {
  if (!M.allFinite())
    throw std::invalid_argument("svd: input has non-finite entries");

  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(M, Eigen::ComputeThinU |
                                                   Eigen::ComputeThinV);
  SvdFactors f;
  f.U = solver.matrixU();
  f.sigma = solver.singularValues();
  f.V = solver.matrixV();

  if (!f.U.allFinite() || !f.sigma.allFinite() || !f.V.allFinite())
    throw std::runtime_error("svd: factorization did not converge, residual "
                             "non-finite");

  // Deterministic phase: rotate each (u_j, v_j) pair so the first
  // significant entry of u_j is real nonnegative.
  const double sigma1 = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  const double tol = 1e-12 * (sigma1 > 0 ? 1.0 : 1.0);
  for (Eigen::Index j = 0; j < f.U.cols(); ++j) {
    for (Eigen::Index i = 0; i < f.U.rows(); ++i) {
      const cplx u = f.U(i, j);
      if (std::abs(u) > tol) {
        const cplx phase = u / std::abs(u);
        f.U.col(j) *= std::conj(phase);
        f.V.col(j) *= std::conj(phase);
        break;
      }
    }
  }
  return f;
}

SvdFactors svd(const ComplexTensor &M) {
  return svd(Eigen::MatrixXcd(as_matrix(M)));
}

} // namespace lps
