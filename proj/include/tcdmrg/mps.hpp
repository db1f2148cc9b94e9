#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcdmrg/lattice.hpp"
#include "tcdmrg/mpo_builder.hpp"
#include "tcdmrg/numerics.hpp"

namespace tcdmrg {

inline constexpr std::ptrdiff_t kNoCenter = -1;

struct MPS {
  std::vector<DenseTensor> tensors;  // (left bond, 4, right bond)
  std::ptrdiff_t center = kNoCenter;

  std::size_t n_sites() const { return tensors.size(); }
};

// Entries drawn uniformly from [-0.5, 0.5); the state is returned
// right-canonical (center 0) with unit norm.  Bond extents are
// min(m, 4^k, 4^(N-k)) at cut k.
MPS random_mps(const Lattice& lattice, std::size_t m, std::uint64_t seed);

// Exact QR/LQ gauge transformation: left-orthogonal tensors before `center`,
// right-orthogonal after it.  The represented vector is unchanged.
MPS canonicalize(const MPS& state, std::size_t center);

double norm(const MPS& state);
double overlap(const MPS& a, const MPS& b);

// <state|op|state> / <state|state>; the operator is applied as-is, so a
// non-symmetric MPO yields its right-state quotient.
double expectation(const MPS& state, const NumericMPO& op);

// Environments carry shape (bra bond, MPO bond, ket bond); both chain
// boundaries start from the scalar 1 of shape (1,1,1).
DenseTensor boundary_environment();
DenseTensor env_step_left(const DenseTensor& env, const DenseTensor& bra,
                          const SparseMpoSite& op, const DenseTensor& ket);
DenseTensor env_step_right(const DenseTensor& env, const DenseTensor& bra,
                           const SparseMpoSite& op, const DenseTensor& ket);

// Flat binary container: 8-byte magic "TCMPS001", then little-endian u64
// site count, i64 center, and per site u64 left/right bond extents followed
// by the row-major tensor entries as f64.
void save_mps(const MPS& state, const std::string& path);
MPS load_mps(const std::string& path);

}  // namespace tcdmrg
