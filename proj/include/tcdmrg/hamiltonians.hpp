#pragma once

#include <cstddef>

#include "tcdmrg/fermion_algebra.hpp"
#include "tcdmrg/lattice.hpp"

namespace tcdmrg {

struct ModelParams {
  double t = 1.0;
  double u = 0.0;
  double j = 0.0;
  std::size_t n_alpha = 0;
  std::size_t n_beta = 0;
  double penalty_lambda = 0.0;
};

double default_penalty_lambda(const ModelParams& params);

// -t sum over bonds and spins of both hopping directions, plus U n_up n_dn
// per site.  Terms come out in builder order; callers wanting the canonical
// form run canonicalize (assemble does).
SOPOperator hubbard(const LatticePtr& lattice, const ModelParams& params);

// hubbard plus, for each ordered bond (i,j) and spin s, the three
// density-dressed hopping families
//   -t(e^J - 1)      adag_{i,s} a_{j,s} n_{j,sbar}
//   -t(e^{-J} - 1)   adag_{i,s} a_{j,s} n_{i,sbar}
//   +2t(cosh J - 1)  adag_{i,s} a_{j,s} n_{i,sbar} n_{j,sbar}
// generated by the similarity transform with the on-site pair correlator.
// The i<->j asymmetry of the first two families is what makes the operator
// non-Hermitian for J != 0 while leaving the spectrum untouched.
SOPOperator tc_hubbard(const LatticePtr& lattice, const ModelParams& params);

// lambda [ (N_up - n_alpha)^2 + (N_dn - n_beta)^2 ] expanded into a constant,
// single-density and density-density terms via n^2 = n.
SOPOperator number_penalty(const LatticePtr& lattice, const ModelParams& params);

// canonicalize(tc_hubbard + number_penalty): the operator the DMRG run feeds
// to the MPO compiler.
SOPOperator assemble(const LatticePtr& lattice, const ModelParams& params);

// Total number operator for one spin species.
SOPOperator total_number(const LatticePtr& lattice, Spin spin);

}  // namespace tcdmrg
