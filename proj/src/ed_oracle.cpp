#include "tcdmrg/ed_oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <random>

#include "tcdmrg/davidson.hpp"
#include "tcdmrg/errors.hpp"

namespace tcdmrg {

namespace {

constexpr std::size_t kMaxSites = 32;

std::uint64_t binomial(std::size_t n, std::size_t k) {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, kMaxSites + 1>, kMaxSites + 1> c{};
    for (std::size_t i = 0; i <= kMaxSites; ++i) {
      c[i][0] = 1;
      for (std::size_t jj = 1; jj <= i; ++jj)
        c[i][jj] = c[i - 1][jj - 1] + (jj <= i - 1 ? c[i - 1][jj] : 0);
    }
    return c;
  }();
  if (k > n) return 0;
  return table[n][k];
}

std::size_t rank_of_mask(std::uint32_t mask) {
  std::size_t rank = 0, seen = 0;
  while (mask) {
    const unsigned p = std::countr_zero(mask);
    rank += binomial(p, ++seen);
    mask &= mask - 1;
  }
  return rank;
}

std::vector<std::uint32_t> masks_with_popcount(std::size_t bits, std::size_t count) {
  std::vector<std::uint32_t> out;
  out.reserve(binomial(bits, count));
  if (count == 0) {
    out.push_back(0);
    return out;
  }
  std::uint64_t v = (std::uint64_t{1} << count) - 1;
  const std::uint64_t limit = std::uint64_t{1} << bits;
  while (v < limit) {
    out.push_back(static_cast<std::uint32_t>(v));
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

struct CompiledOp {
  bool create;
  unsigned mode;
};

struct CompiledTerm {
  double coeff;
  std::vector<CompiledOp> ops;  // rightmost factor first: application order
};

std::vector<CompiledTerm> compile_terms(const SOPOperator& op,
                                        const DeterminantBasis& basis) {
  if (!op.lattice) throw ConfigError("operator has no lattice attached");
  const std::size_t L = basis.sites;
  std::vector<CompiledTerm> out;
  out.reserve(op.terms.size());
  for (const FermionTerm& term : op.terms) {
    CompiledTerm ct{term.coeff, {}};
    int net_up = 0, net_down = 0;
    for (auto it = term.ops.rbegin(); it != term.ops.rend(); ++it) {
      if (it->site >= L) throw IndexError("operator references site outside basis");
      const unsigned mode =
          static_cast<unsigned>(it->site + (it->spin == Spin::down ? L : 0));
      ct.ops.push_back({it->dagger, mode});
      (it->spin == Spin::up ? net_up : net_down) += it->dagger ? 1 : -1;
    }
    if (net_up != 0 || net_down != 0)
      throw ConfigError(
          "operator does not conserve per-spin particle counts in a fixed sector");
    out.push_back(std::move(ct));
  }
  return out;
}

// Applies one compiled term to an occupation word; returns false if it
// annihilates the state, otherwise updates occ and flips sign per the number
// of occupied modes below each operator's mode.
bool walk_term(const CompiledTerm& term, std::uint64_t& occ, int& sign) {
  for (const CompiledOp& o : term.ops) {
    const std::uint64_t bit = std::uint64_t{1} << o.mode;
    if (o.create == bool(occ & bit)) return false;
    if (std::popcount(occ & (bit - 1)) & 1) sign = -sign;
    occ ^= bit;
  }
  return true;
}

}  // namespace

std::size_t DeterminantBasis::index_of(std::uint32_t up, std::uint32_t down) const {
  if (std::popcount(up) != int(n_alpha) || std::popcount(down) != int(n_beta))
    throw IndexError("bitstring popcount does not match the sector");
  return rank_of_mask(up) * down_states.size() + rank_of_mask(down);
}

DeterminantBasis enumerate_sector(std::size_t sites, std::size_t n_alpha,
                                  std::size_t n_beta) {
  if (sites == 0 || sites > kMaxSites / 2)
    throw DimensionError("determinant basis supports 1..16 sites");
  if (n_alpha > sites || n_beta > sites)
    throw ConfigError("sector populations exceed the site count");
  DeterminantBasis basis;
  basis.sites = sites;
  basis.n_alpha = n_alpha;
  basis.n_beta = n_beta;
  basis.up_states = masks_with_popcount(sites, n_alpha);
  basis.down_states = masks_with_popcount(sites, n_beta);
  return basis;
}

void apply_operator(const SOPOperator& op, const DeterminantBasis& basis,
                    const double* v, double* w) {
  const auto compiled = compile_terms(op, basis);
  const std::size_t L = basis.sites;
  const std::size_t nd = basis.down_states.size();
  const std::size_t total = basis.size();
  std::fill(w, w + total, 0.0);
  const std::uint64_t up_mask = (std::uint64_t{1} << L) - 1;

  for (const CompiledTerm& term : compiled) {
    std::size_t s = 0;
    for (const std::uint32_t up : basis.up_states)
      for (const std::uint32_t down : basis.down_states) {
        const double amp = v[s];
        ++s;
        if (amp == 0.0) continue;
        std::uint64_t occ = up | (std::uint64_t{down} << L);
        int sign = 1;
        if (!walk_term(term, occ, sign)) continue;
        const std::uint32_t up2 = static_cast<std::uint32_t>(occ & up_mask);
        const std::uint32_t dn2 = static_cast<std::uint32_t>(occ >> L);
        const std::size_t idx = rank_of_mask(up2) * nd + rank_of_mask(dn2);
        w[idx] += term.coeff * sign * amp;
      }
  }
}

std::vector<double> apply_operator(const SOPOperator& op,
                                   const DeterminantBasis& basis,
                                   const std::vector<double>& v) {
  if (v.size() != basis.size())
    throw DimensionError("vector length does not match the basis");
  std::vector<double> w(v.size());
  apply_operator(op, basis, v.data(), w.data());
  return w;
}

std::vector<double> operator_diagonal(const SOPOperator& op,
                                      const DeterminantBasis& basis) {
  const auto compiled = compile_terms(op, basis);
  const std::size_t L = basis.sites;
  std::vector<double> diag(basis.size(), 0.0);
  for (const CompiledTerm& term : compiled) {
    std::size_t s = 0;
    for (const std::uint32_t up : basis.up_states)
      for (const std::uint32_t down : basis.down_states) {
        const std::uint64_t start = up | (std::uint64_t{down} << L);
        std::uint64_t occ = start;
        int sign = 1;
        if (walk_term(term, occ, sign) && occ == start)
          diag[s] += term.coeff * sign;
        ++s;
      }
  }
  return diag;
}

std::pair<double, double> ground_energy(const SOPOperator& op,
                                        const DeterminantBasis& basis,
                                        double tol) {
  const std::size_t dim = basis.size();
  if (dim == 0) throw DimensionError("empty determinant basis");
  const auto diag = operator_diagonal(op, basis);

  std::vector<double> guess(dim, 0.0);
  const std::size_t seed_idx = static_cast<std::size_t>(
      std::min_element(diag.begin(), diag.end()) - diag.begin());
  guess[seed_idx] = 1.0;
  std::mt19937_64 rng(7777);
  std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
  for (double& g : guess) g += dist(rng);

  DavidsonConfig cfg;
  cfg.tol = tol;
  cfg.max_iterations = 400;
  const auto result = davidson(
      [&](const double* x, double* y) { apply_operator(op, basis, x, y); }, dim,
      guess, diag, cfg);
  return {result.eigenvalue, result.residual};
}

std::vector<std::complex<double>> spectrum_small(const SOPOperator& op,
                                                 const DeterminantBasis& basis) {
  const std::size_t dim = basis.size();
  if (dim > 300)
    throw ConfigError("spectrum_small is limited to sectors of dimension 300");
  std::vector<double> matrix(dim * dim);
  std::vector<double> e(dim, 0.0), col(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    e[c] = 1.0;
    apply_operator(op, basis, e.data(), col.data());
    e[c] = 0.0;
    for (std::size_t r = 0; r < dim; ++r) matrix[r * dim + c] = col[r];
  }

  std::vector<double> wr(dim), wi(dim);
  const lapack_int n = static_cast<lapack_int>(dim);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', n, matrix.data(), n, wr.data(),
                    wi.data(), nullptr, n, nullptr, n);
  if (info != 0) throw NumericError("dgeev failed on the sector matrix");

  std::vector<std::complex<double>> values(dim);
  for (std::size_t i = 0; i < dim; ++i) values[i] = {wr[i], wi[i]};
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return values;
}

}  // namespace tcdmrg
