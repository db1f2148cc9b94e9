#include "tcdmrg/davidson.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tcdmrg/errors.hpp"
#include "tcdmrg/kernels.hpp"
#include "tcdmrg/numerics.hpp"

namespace tcdmrg {

namespace {

constexpr double kDropTol = 1e-12;
constexpr double kDenomFloor = 1e-8;

double orthogonalize_against(std::vector<double>& c,
                             const std::vector<std::vector<double>>& basis) {
  const std::size_t n = c.size();
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) {
      const double proj = kernels::dot(n, b.data(), c.data());
      kernels::axpy(n, -proj, b.data(), c.data());
    }
  return std::sqrt(kernels::dot(n, c.data(), c.data()));
}

}  // namespace

DavidsonResult davidson(const Matvec& matvec, std::size_t dim,
                        const std::vector<double>& guess,
                        const std::vector<double>& diagonal,
                        const DavidsonConfig& cfg) {
  if (dim == 0) throw DimensionError("davidson: dimension must be positive");
  if (guess.size() != dim) throw DimensionError("davidson: guess length mismatch");
  if (diagonal.size() != dim)
    throw DimensionError("davidson: diagonal length mismatch");
  if (!(cfg.tol > 0.0)) throw ConfigError("davidson: tol must be positive");

  const std::size_t max_sub =
      std::max<std::size_t>(1, std::min({cfg.max_subspace, dim, std::size_t{64}}));
  const std::size_t keep =
      std::max<std::size_t>(1, std::min(cfg.restart_keep, max_sub));

  std::vector<std::vector<double>> V, HV;
  std::vector<double> s_buf(max_sub * max_sub, 0.0);

  auto append = [&](std::vector<double> v) {
    const std::size_t k = V.size();
    HV.emplace_back(dim, 0.0);
    matvec(v.data(), HV.back().data());
    V.push_back(std::move(v));
    for (std::size_t i = 0; i <= k; ++i) {
      s_buf[i * max_sub + k] = kernels::dot(dim, V[i].data(), HV[k].data());
      s_buf[k * max_sub + i] = kernels::dot(dim, V[k].data(), HV[i].data());
    }
  };

  {
    std::vector<double> v0 = guess;
    const double n0 = std::sqrt(kernels::dot(dim, v0.data(), v0.data()));
    if (!(n0 > 1e-14)) throw NumericError("davidson: initial guess has zero norm");
    kernels::scale(dim, 1.0 / n0, v0.data());
    append(std::move(v0));
  }

  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  auto ritz_vector = [&](const EigPair& pair) {
    const std::size_t k = V.size();
    std::vector<double> y(k);
    double re_norm = 0.0;
    for (std::size_t i = 0; i < k; ++i) re_norm += pair.vector[i].real() * pair.vector[i].real();
    const bool use_im = std::sqrt(re_norm) < kDropTol;
    for (std::size_t i = 0; i < k; ++i)
      y[i] = use_im ? pair.vector[i].imag() : pair.vector[i].real();
    double yn = std::sqrt(kernels::dot(k, y.data(), y.data()));
    if (yn > 0.0)
      for (double& c : y) c /= yn;
    return y;
  };

  std::size_t iter = 0;
  while (true) {
    ++iter;
    const std::size_t k = V.size();
    DenseTensor s({k, k});
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t jj = 0; jj < k; ++jj) s.at({i, jj}) = s_buf[i * max_sub + jj];
    const auto eig = eig_general_small(s);

    // Among numerically tied smallest-real Ritz values, prefer the pair with
    // the most weight on the current best direction (subspace coordinate 0)
    // so a degenerate operator does not push the iterate off the guess.
    std::size_t pick = 0;
    {
      const double e0 = eig.front().value.real();
      const double tie = 1e-12 * std::max(1.0, std::abs(e0));
      double best_w = -1.0;
      for (std::size_t p = 0; p < eig.size(); ++p) {
        if (eig[p].value.real() > e0 + tie) break;
        const double w = std::abs(eig[p].vector[0]);
        if (w > best_w + 1e-12) {
          best_w = w;
          pick = p;
        }
      }
    }

    const auto y = ritz_vector(eig[pick]);
    const double energy = eig[pick].value.real();

    std::vector<double> x(dim, 0.0), hx(dim, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      kernels::axpy(dim, y[i], V[i].data(), x.data());
      kernels::axpy(dim, y[i], HV[i].data(), hx.data());
    }
    std::vector<double> r = hx;
    kernels::axpy(dim, -energy, x.data(), r.data());
    const double res = std::sqrt(kernels::dot(dim, r.data(), r.data()));

    if (res <= cfg.tol * std::max(1.0, std::abs(energy)) && (k >= 2 || dim == 1))
      return {energy, std::move(x), iter, res, true};
    if (iter >= cfg.max_iterations)
      return {energy, std::move(x), iter, res, false};

    if (k >= max_sub) {
      std::vector<std::size_t> order(1, pick);
      for (std::size_t p = 0; p < eig.size() && order.size() < keep; ++p) {
        if (p != pick) order.push_back(p);
      }
      std::vector<std::vector<double>> kept;
      for (const std::size_t p : order) {
        const auto yp = ritz_vector(eig[p]);
        std::vector<double> z(dim, 0.0);
        for (std::size_t i = 0; i < k; ++i)
          kernels::axpy(dim, yp[i], V[i].data(), z.data());
        kept.push_back(std::move(z));
      }
      kept = qr_orthonormalize(kept);
      if (kept.empty()) kept.push_back(x);
      V.clear();
      HV.clear();
      std::fill(s_buf.begin(), s_buf.end(), 0.0);
      for (auto& z : kept) append(std::move(z));
      continue;
    }

    std::vector<double> c(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      double d = diagonal[i] - energy;
      if (std::abs(d) < kDenomFloor) d = d < 0.0 ? -kDenomFloor : kDenomFloor;
      c[i] = r[i] / d;
    }
    double cn = orthogonalize_against(c, V);
    if (cn < kDropTol) {
      c = r;
      cn = orthogonalize_against(c, V);
    }
    for (int attempt = 0; attempt < 5 && cn < kDropTol; ++attempt) {
      for (double& v : c) v = dist(rng);
      cn = orthogonalize_against(c, V);
    }
    if (cn < kDropTol)
      throw SolverError("davidson: subspace expansion exhausted", res);
    kernels::scale(dim, 1.0 / cn, c.data());
    append(std::move(c));
  }
}

}  // namespace tcdmrg
