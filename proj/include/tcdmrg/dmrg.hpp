#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcdmrg/davidson.hpp"
#include "tcdmrg/hamiltonians.hpp"
#include "tcdmrg/lattice.hpp"
#include "tcdmrg/mpo_builder.hpp"
#include "tcdmrg/mps.hpp"

namespace tcdmrg {

struct DmrgConfig {
  std::size_t m = 64;
  std::size_t max_sweeps = 20;
  double energy_tol = 1e-8;
  double davidson_tol = 1e-9;
  std::size_t davidson_max_subspace = 25;
  std::uint64_t seed = 1;
};

struct SweepRecord {
  double energy = 0.0;  // operator eigenvalue at the last optimized pair
  double discarded_weight = 0.0;
  std::size_t max_bond = 0;
  double n_up = 0.0;  // measured after the full sweep
  double n_down = 0.0;
};

struct RunResult {
  std::vector<SweepRecord> sweeps;
  double energy = 0.0;  // expectation of the bare (penalty-free) operator
  std::vector<std::size_t> bond_profile;
  double n_up = 0.0;
  double n_down = 0.0;
  bool converged = false;
  std::string diagnostic;
  double final_pair_energy = 0.0;
  MPS state;
};

enum class Direction { left_to_right, right_to_left };

// Action of the two-site effective operator L * W_i * W_{i+1} * R on the
// flattened (left bond, 4, 4, right bond) pair tensor.  The environments and
// MPO sites are captured by reference and must outlive the returned callable;
// scratch buffers are allocated once up front.
Matvec effective_matvec(const DenseTensor& left_env, const SparseMpoSite& w_left,
                        const SparseMpoSite& w_right,
                        const DenseTensor& right_env);

// Exact diagonal of the same effective operator, for the Davidson
// preconditioner.
std::vector<double> effective_diagonal(const DenseTensor& left_env,
                                       const SparseMpoSite& w_left,
                                       const SparseMpoSite& w_right,
                                       const DenseTensor& right_env);

// One half-sweep of two-site updates.  Each adjacent pair is solved with
// Davidson seeded by the current pair tensor, then split by SVD keeping at
// most cfg.m states above the 1e-12 relative singular-value cutoff; the kept
// block is renormalized to unit norm.  The input may be in any gauge; it is
// canonicalized to the sweep's starting center first.
std::pair<MPS, SweepRecord> two_site_sweep(const MPS& state,
                                           const NumericMPO& mpo,
                                           const DmrgConfig& cfg,
                                           Direction direction);

// Full ground-state search: assemble the penalized operator, compile the MPO,
// start from a seeded random state, and alternate sweep directions until the
// relative energy change drops below cfg.energy_tol or max_sweeps is reached.
// The reported energy re-measures the converged state against the bare
// operator without the filling penalty, and the run is flagged not converged
// if either measured filling drifts from its target by 1e-6 or more.
RunResult run_ground_state(const LatticePtr& lattice, const ModelParams& params,
                           const DmrgConfig& cfg);

}  // namespace tcdmrg
