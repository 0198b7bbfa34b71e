#include "lps/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lps {

namespace {
std::size_t product(const std::vector<std::size_t> &dims) {
  std::size_t n = 1;
  for (auto d : dims) {
    if (d == 0)
      throw std::invalid_argument("tensor extents must be positive");
    n *= d;
  }
  return n;
}
} // namespace

ComplexTensor::ComplexTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(product(dims_)) {}

ComplexTensor::ComplexTensor(std::vector<std::size_t> dims,
                             std::vector<cplx> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (data_.size() != product(dims_))
    throw std::invalid_argument("data length does not match extents");
}

ComplexTensor ComplexTensor::zeros_like(const ComplexTensor &other) {
  return ComplexTensor(other.dims_);
}

bool ComplexTensor::all_finite() const {
  for (const auto &v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      return false;
  return true;
}

ComplexTensor &ComplexTensor::operator+=(const ComplexTensor &rhs) {
  if (!same_dims(rhs))
    throw std::invalid_argument("dimension mismatch in tensor sum");
  for (std::size_t i = 0; i < data_.size(); ++i)
    data_[i] += rhs.data_[i];
  return *this;
}

ComplexTensor &ComplexTensor::operator-=(const ComplexTensor &rhs) {
  if (!same_dims(rhs))
    throw std::invalid_argument("dimension mismatch in tensor difference");
  for (std::size_t i = 0; i < data_.size(); ++i)
    data_[i] -= rhs.data_[i];
  return *this;
}

ComplexTensor &ComplexTensor::operator*=(double s) {
  for (auto &v : data_)
    v *= s;
  return *this;
}

ComplexTensor &ComplexTensor::operator*=(cplx s) {
  for (auto &v : data_)
    v *= s;
  return *this;
}

ComplexTensor operator+(ComplexTensor a, const ComplexTensor &b) {
  a += b;
  return a;
}

ComplexTensor operator-(ComplexTensor a, const ComplexTensor &b) {
  a -= b;
  return a;
}

ComplexTensor operator*(double s, ComplexTensor a) {
  a *= s;
  return a;
}

ComplexTensor casorati(const ComplexTensor &x) {
  if (x.ndim() != 3)
    throw std::invalid_argument("casorati expects a 3-dim tensor");
  // Row-major [nx,ny,nt] already stores frame pixels contiguously per
  // (pixel,t) pair, so this is a pure relabel of extents.
  std::vector<cplx> data(x.data(), x.data() + x.size());
  return ComplexTensor({x.dim(0) * x.dim(1), x.dim(2)}, std::move(data));
}

ComplexTensor uncasorati(const ComplexTensor &m, std::size_t nx,
                         std::size_t ny) {
  if (m.ndim() != 2)
    throw std::invalid_argument("uncasorati expects a matrix");
  if (m.dim(0) != nx * ny)
    throw std::invalid_argument("uncasorati: rows != nx*ny");
  std::vector<cplx> data(m.data(), m.data() + m.size());
  return ComplexTensor({nx, ny, m.dim(1)}, std::move(data));
}

cplx inner(const ComplexTensor &x, const ComplexTensor &y) {
  if (!x.same_dims(y))
    throw std::invalid_argument("dimension mismatch in inner product");
  cplx acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += x[i] * std::conj(y[i]);
  return acc;
}

double norm2(const ComplexTensor &x) {
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += std::norm(x[i]);
  return std::sqrt(acc);
}

} // namespace lps
