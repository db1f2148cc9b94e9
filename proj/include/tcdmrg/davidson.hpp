#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tcdmrg {

struct DavidsonConfig {
  double tol = 1e-9;
  std::size_t max_subspace = 25;
  std::size_t restart_keep = 3;
  std::size_t max_iterations = 200;
};

struct DavidsonResult {
  double eigenvalue = 0.0;
  std::vector<double> vector;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

using Matvec = std::function<void(const double* x, double* y)>;

// Smallest-real-part eigenpair of a real linear operator that need not be
// symmetric.  The subspace stays real and orthonormal; the projected matrix is
// solved as a general eigenproblem and stray imaginary components of the Ritz
// pair are discarded.  `diagonal` feeds the diag(H)-E preconditioner.
// Convergence: ||H x - E x|| <= tol * max(1, |E|).  A zero residual alone is
// not accepted while the subspace holds a single vector, so a guess that is an
// exact excited eigenvector cannot end the search prematurely.  Hitting the
// iteration cap is not an error: the best Ritz pair found is returned with
// converged = false.  Every subspace — the initial one and each restart —
// contains the current best Ritz vector, so for a symmetric operator the
// returned value never exceeds the guess's Rayleigh quotient.  Structural
// problems — bad dimensions, a zero guess, an exhausted expansion space —
// still throw.
DavidsonResult davidson(const Matvec& matvec, std::size_t dim,
                        const std::vector<double>& guess,
                        const std::vector<double>& diagonal,
                        const DavidsonConfig& cfg);

}  // namespace tcdmrg
