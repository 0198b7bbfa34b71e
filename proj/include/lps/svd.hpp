#pragma once

#include <Eigen/Dense>

#include "lps/tensor.hpp"

namespace lps {

/// Thin SVD factors M = U * diag(sigma) * V^H with sigma nonincreasing.
struct SvdFactors {
  Eigen::MatrixXcd U;    // m x r
  Eigen::VectorXd sigma; // r, nonincreasing, >= 0
  Eigen::MatrixXcd V;    // n x r
};

/// Thin SVD with a deterministic phase convention: the first entry of each
/// column of U with magnitude above 1e-12*sigma_1 is rotated to be real
/// nonnegative (V rotated accordingly).
SvdFactors svd(const Eigen::MatrixXcd &M);
SvdFactors svd(const ComplexTensor &M);

Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>>
as_matrix(const ComplexTensor &m);

ComplexTensor from_matrix(const Eigen::MatrixXcd &m);

} // namespace lps
