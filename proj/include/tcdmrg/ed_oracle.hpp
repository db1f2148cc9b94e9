#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "tcdmrg/fermion_algebra.hpp"

namespace tcdmrg {

// Fixed-(N_up, N_dn) determinant basis over L sites.  Each spin species is a
// bitmask with the required popcount; masks are enumerated in ascending
// numeric order and a state's index is up-major: rank(up) * |down| +
// rank(down).  The mode order for fermionic signs is all up modes in site
// order, then all down modes — deliberately independent of any chain ordering,
// so agreement with the tensor-product route is a genuine cross-check.
struct DeterminantBasis {
  std::size_t sites = 0;
  std::size_t n_alpha = 0;
  std::size_t n_beta = 0;
  std::vector<std::uint32_t> up_states;
  std::vector<std::uint32_t> down_states;

  std::size_t size() const { return up_states.size() * down_states.size(); }
  std::size_t index_of(std::uint32_t up, std::uint32_t down) const;
};

DeterminantBasis enumerate_sector(std::size_t sites, std::size_t n_alpha,
                                  std::size_t n_beta);

// w = op * v in the determinant basis, matrix-free.  The operator must
// conserve both spin populations (checked up front), and every referenced
// site must exist.
void apply_operator(const SOPOperator& op, const DeterminantBasis& basis,
                    const double* v, double* w);
std::vector<double> apply_operator(const SOPOperator& op,
                                   const DeterminantBasis& basis,
                                   const std::vector<double>& v);

// Diagonal entries of the operator in the same basis.
std::vector<double> operator_diagonal(const SOPOperator& op,
                                      const DeterminantBasis& basis);

// Smallest-real eigenvalue via the shared Davidson solver; returns (energy,
// final residual norm).
std::pair<double, double> ground_energy(const SOPOperator& op,
                                        const DeterminantBasis& basis,
                                        double tol);

// Full eigenvalue list for sectors of dimension <= 300, sorted by real part.
std::vector<std::complex<double>> spectrum_small(const SOPOperator& op,
                                                 const DeterminantBasis& basis);

}  // namespace tcdmrg
