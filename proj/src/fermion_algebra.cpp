#include "tcdmrg/fermion_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>

#include "tcdmrg/errors.hpp"

namespace tcdmrg {

namespace {

constexpr double kCoeffEps = 1e-14;

std::tuple<int, std::size_t, int> sort_key(const Lattice& lattice, const LadderOp& op) {
  return {op.dagger ? 0 : 1, lattice.position_of_site(op.site),
          op.spin == Spin::up ? 0 : 1};
}

bool same_mode(const LadderOp& a, const LadderOp& b) {
  return a.site == b.site && a.spin == b.spin;
}

void validate_sites(const SOPOperator& op) {
  if (!op.lattice) throw ConfigError("operator has no lattice attached");
  for (const FermionTerm& t : op.terms)
    for (const LadderOp& o : t.ops)
      if (o.site >= op.lattice->n_sites())
        throw IndexError("ladder operator site out of range");
}

}  // namespace

LocalOp local_matrix(OpKind kind, Spin spin) {
  LocalOp r;
  switch (kind) {
    case OpKind::create:
      r.parity_odd = true;
      if (spin == Spin::up) {
        r.at(1, 0) = 1.0;
        r.at(3, 2) = 1.0;
      } else {
        r.at(2, 0) = 1.0;
        r.at(3, 1) = -1.0;  // adag_dn |up> = -|updown> given |updown> = adag_up adag_dn |0>
      }
      break;
    case OpKind::annihilate:
      r.parity_odd = true;
      if (spin == Spin::up) {
        r.at(0, 1) = 1.0;
        r.at(2, 3) = 1.0;
      } else {
        r.at(0, 2) = 1.0;
        r.at(1, 3) = -1.0;
      }
      break;
    case OpKind::number:
      if (spin == Spin::up) {
        r.at(1, 1) = 1.0;
        r.at(3, 3) = 1.0;
      } else {
        r.at(2, 2) = 1.0;
        r.at(3, 3) = 1.0;
      }
      break;
  }
  return r;
}

LocalOp local_identity() {
  LocalOp r;
  for (std::size_t i = 0; i < 4; ++i) r.at(i, i) = 1.0;
  return r;
}

LocalOp local_parity() {
  LocalOp r;
  r.at(0, 0) = 1.0;
  r.at(1, 1) = -1.0;
  r.at(2, 2) = -1.0;
  r.at(3, 3) = 1.0;
  return r;
}

LocalOp multiply(const LocalOp& a, const LocalOp& b) {
  LocalOp r;
  r.parity_odd = a.parity_odd != b.parity_odd;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < 4; ++j) r.at(i, j) += aik * b.at(k, j);
    }
  return r;
}

bool is_identity(const LocalOp& a) { return a == local_identity(); }

SOPOperator canonicalize(const SOPOperator& op) {
  validate_sites(op);
  const Lattice& lattice = *op.lattice;

  std::vector<FermionTerm> sorted;
  sorted.reserve(op.terms.size());
  for (const FermionTerm& term : op.terms) {
    FermionTerm t = term;
    // Bubble to a fixpoint: adjacent transpositions of distinct-mode operators
    // only, each flipping the sign.  Same-mode pairs stay put, so an
    // annihilator left of its own creator simply blocks and the term keeps
    // that local order.
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t k = 0; k + 1 < t.ops.size(); ++k) {
        if (same_mode(t.ops[k], t.ops[k + 1])) continue;
        if (sort_key(lattice, t.ops[k + 1]) < sort_key(lattice, t.ops[k])) {
          std::swap(t.ops[k], t.ops[k + 1]);
          t.coeff = -t.coeff;
          moved = true;
        }
      }
    }
    if (std::abs(t.coeff) < kCoeffEps) continue;
    sorted.push_back(std::move(t));
  }

  auto term_less = [&lattice](const FermionTerm& a, const FermionTerm& b) {
    const std::size_t n = std::min(a.ops.size(), b.ops.size());
    for (std::size_t k = 0; k < n; ++k) {
      const auto ka = sort_key(lattice, a.ops[k]);
      const auto kb = sort_key(lattice, b.ops[k]);
      if (ka != kb) return ka < kb;
    }
    return a.ops.size() < b.ops.size();
  };
  std::stable_sort(sorted.begin(), sorted.end(), term_less);

  SOPOperator result;
  result.lattice = op.lattice;
  for (FermionTerm& t : sorted) {
    if (!result.terms.empty() && result.terms.back().ops == t.ops)
      result.terms.back().coeff += t.coeff;
    else
      result.terms.push_back(std::move(t));
  }
  std::erase_if(result.terms,
                [](const FermionTerm& t) { return std::abs(t.coeff) < kCoeffEps; });
  return result;
}

std::map<std::size_t, LocalOp> term_to_site_factors(const FermionTerm& term,
                                                    const Lattice& lattice) {
  std::map<std::size_t, LocalOp> factors;
  auto factor_at = [&factors](std::size_t pos) -> LocalOp& {
    auto it = factors.find(pos);
    if (it == factors.end()) it = factors.emplace(pos, local_identity()).first;
    return it->second;
  };

  const LocalOp parity = local_parity();
  for (const LadderOp& op : term.ops) {
    if (op.site >= lattice.n_sites())
      throw IndexError("ladder operator site out of range");
    const std::size_t pos = lattice.position_of_site(op.site);
    for (std::size_t q = 0; q < pos; ++q) {
      LocalOp& f = factor_at(q);
      f = multiply(f, parity);
    }
    LocalOp& f = factor_at(pos);
    f = multiply(f, local_matrix(op.dagger ? OpKind::create : OpKind::annihilate,
                                 op.spin));
  }

  std::erase_if(factors, [](const auto& kv) { return is_identity(kv.second); });
  return factors;
}

DenseTensor dense_operator_matrix(const SOPOperator& op) {
  validate_sites(op);
  const std::size_t n = op.lattice->n_sites();
  if (n > 8) throw DimensionError("dense operator matrix limited to 8 sites");
  std::size_t dim = 1;
  for (std::size_t i = 0; i < n; ++i) dim *= 4;

  DenseTensor result({dim, dim});
  std::vector<double> cur, next;
  for (const FermionTerm& term : op.terms) {
    const auto factors = term_to_site_factors(term, *op.lattice);
    cur.assign(1, 1.0);
    std::size_t d = 1;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const auto it = factors.find(pos);
      const LocalOp f = it == factors.end() ? local_identity() : it->second;
      next.assign(16 * d * d, 0.0);
      const std::size_t nd = 4 * d;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          const double c = cur[i * d + j];
          if (c == 0.0) continue;
          for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t s = 0; s < 4; ++s) {
              const double v = f.at(r, s);
              if (v != 0.0) next[(4 * i + r) * nd + (4 * j + s)] = c * v;
            }
        }
      cur.swap(next);
      d = nd;
    }
    for (std::size_t k = 0; k < dim * dim; ++k)
      result.data()[k] += term.coeff * cur[k];
  }
  return result;
}

void add_term(SOPOperator& op, double coeff, std::vector<LadderOp> ops) {
  op.terms.push_back({coeff, std::move(ops)});
}

SOPOperator sum(const SOPOperator& a, const SOPOperator& b) {
  if (a.lattice != b.lattice)
    throw ConfigError("cannot add operators on different lattices");
  SOPOperator r = a;
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  return r;
}

}  // namespace tcdmrg
