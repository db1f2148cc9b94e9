#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "tcdmrg/errors.hpp"

namespace tcdmrg {

// Dense real tensor, row-major.  product(shape) == data.size() always holds;
// a rank-0 tensor has one element.
class DenseTensor {
 public:
  DenseTensor() : shape_{}, data_(1, 0.0) {}
  explicit DenseTensor(std::vector<std::size_t> shape);
  DenseTensor(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(const std::vector<std::size_t>& index);
  double at(const std::vector<std::size_t>& index) const;

  // Reinterprets the extents; the data is untouched.
  DenseTensor reshape(std::vector<std::size_t> new_shape) const;
  // axes[k] names the source axis that becomes result axis k.
  DenseTensor permute(const std::vector<std::size_t>& axes) const;

  double frobenius_norm() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Contraction over the listed (axis-of-a, axis-of-b) pairs.  Free axes of a
// come first in the result, then free axes of b, each in their original order.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

struct SVDResult {
  DenseTensor U;           // m x k
  std::vector<double> S;   // k, nonincreasing, >= 0
  DenseTensor Vt;          // k x n
};

// Thin SVD of a rank-2 tensor.
SVDResult svd(const DenseTensor& a);

// Number of singular values above the numerical-zero cutoff 1e-12 * S[0].
std::size_t svd_rank(const SVDResult& r);

struct EigPair {
  std::complex<double> value;
  std::vector<std::complex<double>> vector;  // right eigenvector
};

// Full eigendecomposition of a real square matrix, dim <= 64, sorted by
// ascending real part (ties by imaginary part).  The inputs stay real; complex
// values appear only in the returned pairs.
std::vector<EigPair> eig_general_small(const DenseTensor& a);

// Modified Gram-Schmidt with a re-orthogonalization pass.  Input vectors whose
// residual after projection has norm < 1e-12 are dropped.
std::vector<std::vector<double>> qr_orthonormalize(
    const std::vector<std::vector<double>>& vectors);

// Row-major matrix product C = A * B (or A * B^T), delegated to BLAS.
// A is m x k; B is k x n (or n x k when transpose_b).
void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a,
            const double* b, double* c, bool transpose_b = false);

// Economy QR / LQ factorizations used for MPS canonical forms.
// qr_factor: a (m x n) -> Q (m x r), R (r x n), r = min(m, n).
// lq_factor: a (m x n) -> L (m x r), Q (r x n).
std::pair<DenseTensor, DenseTensor> qr_factor(const DenseTensor& a);
std::pair<DenseTensor, DenseTensor> lq_factor(const DenseTensor& a);

}  // namespace tcdmrg
