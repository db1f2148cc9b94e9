#include "tcdmrg/numerics.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "tcdmrg/kernels.hpp"

namespace tcdmrg {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

void check_finite(const DenseTensor& a, const char* where) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i]))
      throw NumericError(std::string(where) + ": non-finite input entry");
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_product(shape_))
    throw DimensionError("DenseTensor: data length does not match shape");
}

double& DenseTensor::at(const std::vector<std::size_t>& index) {
  if (index.size() != shape_.size())
    throw DimensionError("DenseTensor::at: index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= shape_[k]) throw IndexError("DenseTensor::at: index out of range");
    flat = flat * shape_[k] + index[k];
  }
  return data_[flat];
}

double DenseTensor::at(const std::vector<std::size_t>& index) const {
  return const_cast<DenseTensor*>(this)->at(index);
}

DenseTensor DenseTensor::reshape(std::vector<std::size_t> new_shape) const {
  if (shape_product(new_shape) != data_.size())
    throw DimensionError("reshape: new shape does not preserve element count");
  DenseTensor out;
  out.shape_ = std::move(new_shape);
  out.data_ = data_;
  return out;
}

DenseTensor DenseTensor::permute(const std::vector<std::size_t>& axes) const {
  const std::size_t r = rank();
  if (axes.size() != r) throw DimensionError("permute: axis list rank mismatch");
  std::vector<bool> seen(r, false);
  std::vector<std::size_t> out_shape(r);
  for (std::size_t k = 0; k < r; ++k) {
    if (axes[k] >= r || seen[axes[k]]) throw DimensionError("permute: invalid axis list");
    seen[axes[k]] = true;
    out_shape[k] = shape_[axes[k]];
  }
  DenseTensor out(out_shape);
  if (out.size() == 0) return out;

  std::vector<std::size_t> in_strides(r, 1);
  for (std::size_t k = r; k-- > 1;) in_strides[k - 1] = in_strides[k] * shape_[k];
  // Stride of the source index that each output axis walks over.
  std::vector<std::size_t> walk(r);
  for (std::size_t k = 0; k < r; ++k) walk[k] = in_strides[axes[k]];

  std::vector<std::size_t> idx(r, 0);
  std::size_t src = 0;
  const std::size_t total = out.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    out.data_[flat] = data_[src];
    for (std::size_t k = r; k-- > 0;) {
      src += walk[k];
      if (++idx[k] < out_shape[k]) break;
      idx[k] = 0;
      src -= walk[k] * out_shape[k];
    }
  }
  return out;
}

double DenseTensor::frobenius_norm() const {
  return std::sqrt(kernels::dot(data_.size(), data_.data(), data_.data()));
}

void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a,
            const double* b, double* c, bool transpose_b) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    std::memset(c, 0, m * n * sizeof(double));
    return;
  }
  cblas_dgemm(CblasRowMajor, CblasNoTrans, transpose_b ? CblasTrans : CblasNoTrans,
              static_cast<int>(m), static_cast<int>(n), static_cast<int>(k), 1.0, a,
              static_cast<int>(k), b, static_cast<int>(transpose_b ? k : n), 0.0, c,
              static_cast<int>(n));
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<bool> a_used(a.rank(), false), b_used(b.rank(), false);
  for (const auto& [ai, bi] : pairs) {
    if (ai >= a.rank() || bi >= b.rank())
      throw DimensionError("contract: axis out of range");
    if (a_used[ai] || b_used[bi])
      throw DimensionError("contract: axis listed twice");
    if (a.extent(ai) != b.extent(bi))
      throw DimensionError("contract: paired extents differ");
    a_used[ai] = true;
    b_used[bi] = true;
  }

  std::vector<std::size_t> a_free, b_free, a_contr, b_contr;
  for (std::size_t k = 0; k < a.rank(); ++k)
    if (!a_used[k]) a_free.push_back(k);
  for (std::size_t k = 0; k < b.rank(); ++k)
    if (!b_used[k]) b_free.push_back(k);
  for (const auto& [ai, bi] : pairs) {
    a_contr.push_back(ai);
    b_contr.push_back(bi);
  }

  std::vector<std::size_t> a_perm = a_free, b_perm = b_contr;
  a_perm.insert(a_perm.end(), a_contr.begin(), a_contr.end());
  b_perm.insert(b_perm.end(), b_free.begin(), b_free.end());

  std::size_t m = 1, kdim = 1, n = 1;
  std::vector<std::size_t> out_shape;
  for (std::size_t ax : a_free) {
    m *= a.extent(ax);
    out_shape.push_back(a.extent(ax));
  }
  for (std::size_t ax : a_contr) kdim *= a.extent(ax);
  for (std::size_t ax : b_free) {
    n *= b.extent(ax);
    out_shape.push_back(b.extent(ax));
  }

  const DenseTensor ap = a.permute(a_perm);
  const DenseTensor bp = b.permute(b_perm);
  DenseTensor out(out_shape);
  matmul(m, kdim, n, ap.data(), bp.data(), out.data());
  return out;
}

SVDResult svd(const DenseTensor& a) {
  if (a.rank() != 2) throw DimensionError("svd: expected a rank-2 tensor");
  check_finite(a, "svd");
  const std::size_t m = a.extent(0), n = a.extent(1);
  if (m == 0 || n == 0) throw DimensionError("svd: zero extent");
  const std::size_t k = std::min(m, n);

  std::vector<double> work(a.data(), a.data() + a.size());
  SVDResult r;
  r.U = DenseTensor({m, k});
  r.S.assign(k, 0.0);
  r.Vt = DenseTensor({k, n});
  const int info = LAPACKE_dgesdd(
      LAPACK_ROW_MAJOR, 'S', static_cast<int>(m), static_cast<int>(n), work.data(),
      static_cast<int>(n), r.S.data(), r.U.data(), static_cast<int>(k), r.Vt.data(),
      static_cast<int>(n));
  if (info != 0)
    throw NumericError("svd: dgesdd failed with info " + std::to_string(info));
  return r;
}

std::size_t svd_rank(const SVDResult& r) {
  if (r.S.empty()) return 0;
  const double cutoff = 1e-12 * r.S.front();
  std::size_t count = 0;
  for (double s : r.S)
    if (s > cutoff && s > 0.0) ++count;
  return count;
}

std::vector<EigPair> eig_general_small(const DenseTensor& a) {
  if (a.rank() != 2 || a.extent(0) != a.extent(1))
    throw DimensionError("eig_general_small: expected a square matrix");
  const std::size_t n = a.extent(0);
  if (n == 0 || n > 64)
    throw DimensionError("eig_general_small: dimension must be in [1, 64]");
  check_finite(a, "eig_general_small");

  std::vector<double> work(a.data(), a.data() + a.size());
  std::vector<double> wr(n), wi(n), vr(n * n);
  const int info =
      LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'V', static_cast<int>(n), work.data(),
                    static_cast<int>(n), wr.data(), wi.data(), nullptr,
                    static_cast<int>(n), vr.data(), static_cast<int>(n));
  if (info != 0)
    throw NumericError("eig_general_small: dgeev failed with info " +
                       std::to_string(info));

  // dgeev packs a conjugate pair's eigenvectors into two adjacent real columns.
  std::vector<EigPair> pairs(n);
  for (std::size_t j = 0; j < n; ++j) {
    pairs[j].value = {wr[j], wi[j]};
    pairs[j].vector.resize(n);
  }
  for (std::size_t j = 0; j < n;) {
    if (wi[j] == 0.0) {
      for (std::size_t i = 0; i < n; ++i) pairs[j].vector[i] = vr[i * n + j];
      ++j;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double re = vr[i * n + j], im = vr[i * n + j + 1];
        pairs[j].vector[i] = {re, im};
        pairs[j + 1].vector[i] = {re, -im};
      }
      j += 2;
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const EigPair& x, const EigPair& y) {
    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
    return x.value.imag() < y.value.imag();
  });
  return pairs;
}

std::vector<std::vector<double>> qr_orthonormalize(
    const std::vector<std::vector<double>>& vectors) {
  std::vector<std::vector<double>> out;
  if (vectors.empty()) return out;
  const std::size_t n = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != n) throw DimensionError("qr_orthonormalize: length mismatch");
    std::vector<double> w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : out)
        kernels::axpy(n, -kernels::dot(n, u.data(), w.data()), u.data(), w.data());
    const double nrm = std::sqrt(kernels::dot(n, w.data(), w.data()));
    if (nrm < 1e-12) continue;
    kernels::scale(n, 1.0 / nrm, w.data());
    out.push_back(std::move(w));
  }
  return out;
}

std::pair<DenseTensor, DenseTensor> qr_factor(const DenseTensor& a) {
  if (a.rank() != 2) throw DimensionError("qr_factor: expected a rank-2 tensor");
  const std::size_t m = a.extent(0), n = a.extent(1);
  const std::size_t k = std::min(m, n);
  std::vector<double> work(a.data(), a.data() + a.size());
  std::vector<double> tau(k);
  int info = LAPACKE_dgeqrf(LAPACK_ROW_MAJOR, static_cast<int>(m), static_cast<int>(n),
                            work.data(), static_cast<int>(n), tau.data());
  if (info != 0) throw NumericError("qr_factor: dgeqrf failed");
  DenseTensor r({k, n});
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < n; ++j) r.at({i, j}) = work[i * n + j];
  info = LAPACKE_dorgqr(LAPACK_ROW_MAJOR, static_cast<int>(m), static_cast<int>(k),
                        static_cast<int>(k), work.data(), static_cast<int>(n),
                        tau.data());
  if (info != 0) throw NumericError("qr_factor: dorgqr failed");
  DenseTensor q({m, k});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) q.at({i, j}) = work[i * n + j];
  return {std::move(q), std::move(r)};
}

std::pair<DenseTensor, DenseTensor> lq_factor(const DenseTensor& a) {
  if (a.rank() != 2) throw DimensionError("lq_factor: expected a rank-2 tensor");
  const std::size_t m = a.extent(0), n = a.extent(1);
  const std::size_t k = std::min(m, n);
  std::vector<double> work(a.data(), a.data() + a.size());
  std::vector<double> tau(k);
  int info = LAPACKE_dgelqf(LAPACK_ROW_MAJOR, static_cast<int>(m), static_cast<int>(n),
                            work.data(), static_cast<int>(n), tau.data());
  if (info != 0) throw NumericError("lq_factor: dgelqf failed");
  DenseTensor l({m, k});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= std::min(i, k - 1); ++j) l.at({i, j}) = work[i * n + j];
  info = LAPACKE_dorglq(LAPACK_ROW_MAJOR, static_cast<int>(k), static_cast<int>(n),
                        static_cast<int>(k), work.data(), static_cast<int>(n),
                        tau.data());
  if (info != 0) throw NumericError("lq_factor: dorglq failed");
  DenseTensor q({k, n});
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) q.at({i, j}) = work[i * n + j];
  return {std::move(l), std::move(q)};
}

}  // namespace tcdmrg
