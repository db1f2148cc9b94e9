#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tcdmrg/ed_oracle.hpp"
#include "tcdmrg/fermion_algebra.hpp"
#include "tcdmrg/lattice.hpp"
#include "tcdmrg/mpo_builder.hpp"
#include "tcdmrg/mps.hpp"
#include "tcdmrg/numerics.hpp"

namespace tcdmrg::testing {

// Chain Fock index of the determinant (up, down): chain position 0 is the most
// significant base-4 digit, with local digit = up_bit + 2 * down_bit.
inline std::size_t chain_index(const Lattice& lat, std::uint32_t up,
                               std::uint32_t down) {
  std::size_t idx = 0;
  for (std::size_t p = 0; p < lat.n_sites(); ++p) {
    const std::size_t s = lat.site_at_position(p);
    const std::size_t digit =
        ((up >> s) & 1u) + 2 * ((down >> s) & 1u);
    idx = idx * 4 + digit;
  }
  return idx;
}

// Sign relating the determinant-basis state (creation modes sorted: up modes
// by site, then down modes) to the chain tensor-product state (creation modes
// by chain position, up before down on a site).  Equals the parity of the
// permutation between the two creation orders.
inline int chain_sign(const Lattice& lat, std::uint32_t up, std::uint32_t down) {
  const std::size_t L = lat.n_sites();
  std::vector<std::size_t> chain_order;
  for (std::size_t p = 0; p < L; ++p) {
    const std::size_t s = lat.site_at_position(p);
    if ((up >> s) & 1u) chain_order.push_back(s);
    if ((down >> s) & 1u) chain_order.push_back(L + s);
  }
  int sign = 1;
  for (std::size_t i = 0; i < chain_order.size(); ++i)
    for (std::size_t jj = i + 1; jj < chain_order.size(); ++jj)
      if (chain_order[i] > chain_order[jj]) sign = -sign;
  return sign;
}

// Dense sector matrix assembled column-by-column from apply_operator.
inline DenseTensor ed_matrix(const SOPOperator& op, const DeterminantBasis& basis) {
  const std::size_t dim = basis.size();
  DenseTensor m({dim, dim});
  std::vector<double> e(dim, 0.0), col(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    e[c] = 1.0;
    apply_operator(op, basis, e.data(), col.data());
    e[c] = 0.0;
    for (std::size_t r = 0; r < dim; ++r) m.at({r, c}) = col[r];
  }
  return m;
}

// Full 4^N x 4^N matrix of an MPO in the chain tensor-product basis (chain
// position 0 is the most significant factor).
inline DenseTensor mpo_dense(const NumericMPO& mpo) {
  DenseTensor cur = mpo.tensors.at(0);
  cur = cur.reshape({4, 4, cur.extent(3)});
  for (std::size_t i = 1; i < mpo.tensors.size(); ++i) {
    const DenseTensor& w = mpo.tensors[i];
    DenseTensor merged = contract(cur, w, {{2, 0}});
    // axes: (S_out, S_in, s_out, s_in, bond) -> (S_out, s_out, S_in, s_in, bond)
    merged = merged.permute({0, 2, 1, 3, 4});
    cur = merged.reshape({merged.extent(0) * merged.extent(1),
                          merged.extent(2) * merged.extent(3),
                          merged.extent(4)});
  }
  if (cur.extent(2) != 1) throw DimensionError("MPO right boundary bond != 1");
  return cur.reshape({cur.extent(0), cur.extent(1)});
}

// Full 4^N state vector of an MPS in the chain tensor-product basis (chain
// position 0 is the most significant factor).
inline std::vector<double> dense_state(const MPS& state) {
  DenseTensor cur = state.tensors.at(0);
  if (cur.extent(0) != 1) throw DimensionError("MPS left boundary bond != 1");
  cur = cur.reshape({cur.extent(1), cur.extent(2)});
  for (std::size_t i = 1; i < state.tensors.size(); ++i) {
    DenseTensor merged = contract(cur, state.tensors[i], {{1, 0}});
    cur = merged.reshape({merged.extent(0) * merged.extent(1), merged.extent(2)});
  }
  if (cur.extent(1) != 1) throw DimensionError("MPS right boundary bond != 1");
  std::vector<double> v(cur.extent(0));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cur.data()[i];
  return v;
}

// Maximum bipartite matching by augmenting paths; independent of the library
// matcher so it can serve as its oracle.
inline std::size_t kuhn_matching(std::size_t n_right,
                                 const std::vector<std::vector<std::size_t>>& adj) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match_r(n_right, none);
  std::vector<char> used;
  std::function<bool(std::size_t)> augment = [&](std::size_t u) -> bool {
    for (std::size_t v : adj[u]) {
      if (used[v]) continue;
      used[v] = 1;
      if (match_r[v] == none || augment(match_r[v])) {
        match_r[v] = u;
        return true;
      }
    }
    return false;
  };
  std::size_t size = 0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    used.assign(n_right, 0);
    if (augment(u)) ++size;
  }
  return size;
}

// Rank of the coefficient unfolding at a cut, for generic coefficient values:
// rows are the distinct left-site factor strings (positions < cut), columns
// the distinct right strings, and an entry is present when the summed term
// coefficient survives the 1e-14 cutoff.  The generic rank of such a sparse
// pattern is the maximum matching of its support graph.
inline std::size_t unfolding_rank(const SOPOperator& op, std::size_t cut) {
  std::map<std::string, std::size_t> rows, cols;
  std::map<std::pair<std::size_t, std::size_t>, double> gamma;
  for (const auto& term : op.terms) {
    const auto factors = term_to_site_factors(term, *op.lattice);
    std::ostringstream lkey, rkey;
    for (const auto& [pos, local] : factors) {
      std::ostringstream& out = pos < cut ? lkey : rkey;
      out << pos << '[';
      for (double v : local.m) out << v << ',';
      out << (local.parity_odd ? "?]" : "]");
    }
    const std::size_t r = rows.try_emplace(lkey.str(), rows.size()).first->second;
    const std::size_t c = cols.try_emplace(rkey.str(), cols.size()).first->second;
    gamma[{r, c}] += term.coeff;
  }
  std::vector<std::vector<std::size_t>> adj(rows.size());
  for (const auto& [rc, g] : gamma) {
    if (std::abs(g) >= 1e-14) adj[rc.first].push_back(rc.second);
  }
  return kuhn_matching(cols.size(), adj);
}

}  // namespace tcdmrg::testing
