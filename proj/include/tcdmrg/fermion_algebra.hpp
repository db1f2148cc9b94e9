#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <vector>

#include "tcdmrg/lattice.hpp"
#include "tcdmrg/numerics.hpp"

namespace tcdmrg {

enum class Spin { up, down };
enum class OpKind { create, annihilate, number };

inline Spin other(Spin s) { return s == Spin::up ? Spin::down : Spin::up; }

struct LadderOp {
  std::size_t site;
  Spin spin;
  bool dagger;
  bool operator==(const LadderOp&) const = default;
};

struct FermionTerm {
  double coeff = 0.0;
  std::vector<LadderOp> ops;  // a product, leftmost factor first
};

struct SOPOperator {
  std::vector<FermionTerm> terms;
  LatticePtr lattice;
};

// Operator on one chain site.  Local basis order |0>, |up>, |down>, |updown>
// with the sign convention |updown> = adag_up adag_down |0>; that single choice
// fixes every sign below and is pinned by the anticommutation test suite.
struct LocalOp {
  std::array<double, 16> m{};  // row-major 4x4
  bool parity_odd = false;     // true iff the operator flips fermion parity

  double& at(std::size_t r, std::size_t c) { return m[4 * r + c]; }
  double at(std::size_t r, std::size_t c) const { return m[4 * r + c]; }
  bool operator==(const LocalOp&) const = default;
};

LocalOp local_matrix(OpKind kind, Spin spin);
LocalOp local_identity();
// diag(1,-1,-1,1): the on-site fermion parity inserted by Jordan-Wigner
// strings between an operator's site and the chain start.
LocalOp local_parity();
LocalOp multiply(const LocalOp& a, const LocalOp& b);
bool is_identity(const LocalOp& a);

// Canonical form: within each term, creation operators precede annihilation
// operators and each group is sorted by (chain position, spin), reached only
// through adjacent transpositions of operators on distinct modes (each flips
// the sign).  Operators on the same mode are never reordered, so products like
// a adag survive verbatim; no normal-ordering identities are applied.
// Duplicate terms merge and coefficients below 1e-14 are dropped.
SOPOperator canonicalize(const SOPOperator& op);

// Per-chain-site factors of one term, Jordan-Wigner parity folded in: every
// ladder operator contributes its 4x4 matrix at its own chain position and a
// parity factor on every position strictly below it.  Positions whose factor
// multiplies out to the identity are omitted from the map.
std::map<std::size_t, LocalOp> term_to_site_factors(const FermionTerm& term,
                                                    const Lattice& lattice);

// Dense matrix of the operator on the full chain Fock space (4^N), basis
// ordered with chain position 0 as the most significant digit.  Test-scale
// only: N <= 8.
DenseTensor dense_operator_matrix(const SOPOperator& op);

// Convenience used by the Hamiltonian builders and tests.
void add_term(SOPOperator& op, double coeff, std::vector<LadderOp> ops);
SOPOperator sum(const SOPOperator& a, const SOPOperator& b);

}  // namespace tcdmrg
