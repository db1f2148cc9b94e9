#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tcdmrg/fermion_algebra.hpp"
#include "tcdmrg/numerics.hpp"

namespace tcdmrg {

struct BipartiteGraph {
  struct Edge {
    std::size_t left, right;
    double weight;
    bool operator==(const Edge&) const = default;
  };
  std::size_t n_left = 0, n_right = 0;
  std::vector<Edge> edges;  // no duplicate (left,right) pairs; weights pre-summed
};

// Maximum matching as (left, right) pairs sorted by left vertex.
std::vector<std::pair<std::size_t, std::size_t>> hopcroft_karp(
    const BipartiteGraph& graph);

struct VertexCover {
  std::vector<std::size_t> left, right;  // sorted vertex ids per side
  std::size_t size() const { return left.size() + right.size(); }
};

// Minimum vertex cover from a maximum matching via alternating-path
// reachability.  The matching is re-checked: an invalid or non-maximum
// matching raises ContractViolationError.  Every cover vertex keeps its
// matched edge, so no MPO column built from the cover can be empty.
VertexCover min_vertex_cover(
    const BipartiteGraph& graph,
    const std::vector<std::pair<std::size_t, std::size_t>>& matching);

struct SymbolicEntry {
  std::size_t op_id;
  double prefactor;
  bool operator==(const SymbolicEntry&) const = default;
};

struct SymbolicSite {
  std::vector<std::string> row_keys, col_keys;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<SymbolicEntry>> cells;
  bool operator==(const SymbolicSite&) const = default;
};

struct SymbolicMPO {
  std::vector<SymbolicSite> sites;
  std::vector<LocalOp> op_table;  // op_id -> elementary 4x4 factor
  bool operator==(const SymbolicMPO&) const = default;
};

struct NumericMPO {
  std::vector<DenseTensor> tensors;  // (left bond, s_out, s_in, right bond)
};

struct MpoBuildResult {
  SymbolicMPO symbolic;
  NumericMPO numeric;
  std::vector<std::size_t> bond_profile;  // n_sites + 1 entries, 1 at both ends
};

// Left-to-right compilation of a canonicalized operator into an exact MPO.
// At each cut the candidate left-block extensions and right-block remainders
// form a weighted bipartite graph; the minimum vertex cover decides which left
// operators continue unchanged (prefactor 1) and which right remainders are
// served by complementary columns that absorb the coefficients.  The cover
// size is the bond dimension.  An operator with no terms compiles to the
// identity chain scaled by zero.
MpoBuildResult build_mpo(const SOPOperator& op);

// Generic-coefficient rank of the operator's unfolding at one chain cut: the
// maximum matching of the bipartite graph linking distinct left factor
// products to distinct right remainders (coefficients summed per pair, pairs
// below 1e-14 dropped).  An exact MPO cannot have a smaller bond there, so
// bond_profile[cut] == this value certifies the compiled bond is optimal.
std::size_t unfolding_generic_rank(const SOPOperator& op, std::size_t cut);

struct MpoStats {
  std::size_t max_bond = 0;
  std::vector<std::size_t> bonds;  // same layout as bond_profile
  double nonzero_density = 0.0;
};

MpoStats mpo_stats(const NumericMPO& mpo);

// Analytic bond caps for the bare and transcorrelated Hubbard operators on
// n sites (snake-ordered square lattices).
double fh_bond_bound(std::size_t n_sites);
double tc_bond_bound(std::size_t n_sites);

// Block-sparse view of a NumericMPO site: one block per (vl, vr) pair that
// holds any nonzero physical element.  The DMRG contractions and MPS
// expectation values run off this view.
struct SparseElem {
  int s_out, s_in;
  double value;
};
struct SparseBlock {
  std::size_t vl, vr;
  std::vector<SparseElem> elems;
};
struct SparseMpoSite {
  std::size_t rows = 1, cols = 1;
  std::vector<SparseBlock> blocks;
};

std::vector<SparseMpoSite> sparsify(const NumericMPO& mpo);

}  // namespace tcdmrg
