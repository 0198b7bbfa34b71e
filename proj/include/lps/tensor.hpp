#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lps {

using cplx = std::complex<double>;

/// Dense n-dimensional complex tensor, row-major.
class ComplexTensor {
public:
  ComplexTensor() = default;
  explicit ComplexTensor(std::vector<std::size_t> dims);
  ComplexTensor(std::vector<std::size_t> dims, std::vector<cplx> data);

  static ComplexTensor zeros_like(const ComplexTensor &other);

  const std::vector<std::size_t> &dims() const { return dims_; }
  std::size_t ndim() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t i) const { return dims_[i]; }

  cplx *data() { return data_.data(); }
  const cplx *data() const { return data_.data(); }

  cplx &operator[](std::size_t i) { return data_[i]; }
  const cplx &operator[](std::size_t i) const { return data_[i]; }

  // [n0,n1] indexing
  cplx &at(std::size_t i, std::size_t j) { return data_[i * dims_[1] + j]; }
  const cplx &at(std::size_t i, std::size_t j) const {
    return data_[i * dims_[1] + j];
  }
  // [n0,n1,n2] indexing
  cplx &at(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  const cplx &at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  // [n0,n1,n2,n3] indexing
  cplx &at(std::size_t c, std::size_t i, std::size_t j, std::size_t k) {
    return data_[((c * dims_[1] + i) * dims_[2] + j) * dims_[3] + k];
  }
  const cplx &at(std::size_t c, std::size_t i, std::size_t j,
                 std::size_t k) const {
    return data_[((c * dims_[1] + i) * dims_[2] + j) * dims_[3] + k];
  }

  bool same_dims(const ComplexTensor &other) const {
    return dims_ == other.dims_;
  }
  bool all_finite() const;

  ComplexTensor &operator+=(const ComplexTensor &rhs);
  ComplexTensor &operator-=(const ComplexTensor &rhs);
  ComplexTensor &operator*=(double s);
  ComplexTensor &operator*=(cplx s);

private:
  std::vector<std::size_t> dims_;
  std::vector<cplx> data_;
};

ComplexTensor operator+(ComplexTensor a, const ComplexTensor &b);
ComplexTensor operator-(ComplexTensor a, const ComplexTensor &b);
ComplexTensor operator*(double s, ComplexTensor a);

/// Reshape [nx,ny,nt] so column t is frame t flattened row-major -> [nx*ny,nt].
ComplexTensor casorati(const ComplexTensor &x);
/// Inverse of casorati.
ComplexTensor uncasorati(const ComplexTensor &m, std::size_t nx,
                         std::size_t ny);

/// sum_i x_i * conj(y_i)
cplx inner(const ComplexTensor &x, const ComplexTensor &y);
/// Euclidean norm.
double norm2(const ComplexTensor &x);

} // namespace lps
