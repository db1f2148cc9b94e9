#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "tcdmrg/errors.hpp"

namespace tcdmrg {

enum class Ordering { row_major, snake };
enum class BondDirection { horizontal, vertical };

struct Bond {
  std::size_t a, b;
  BondDirection direction;
};

// lx x ly rectangular lattice.  Site indices are 0-based row-major
// (site = row * ly + col); the ordering maps chain position -> site index.
class Lattice {
 public:
  Lattice(std::size_t lx, std::size_t ly, bool pbc, Ordering ordering);

  std::size_t lx() const { return lx_; }
  std::size_t ly() const { return ly_; }
  bool pbc() const { return pbc_; }
  Ordering ordering_kind() const { return ordering_kind_; }
  std::size_t n_sites() const { return lx_ * ly_; }

  std::size_t site_at_position(std::size_t chain_pos) const;
  std::size_t position_of_site(std::size_t site) const;

  // One right and one down bond per site, wrapping under pbc.  On 2-wide
  // periodic lattices this yields each unordered pair twice, by design; the
  // Hamiltonian builders and the exact-diagonalization oracle share this
  // enumeration so all energies are mutually consistent.
  std::vector<Bond> bonds() const;

  std::size_t chain_distance(std::size_t site_i, std::size_t site_j) const;

 private:
  std::size_t lx_, ly_;
  bool pbc_;
  Ordering ordering_kind_;
  std::vector<std::size_t> ordering_;   // chain position -> site
  std::vector<std::size_t> positions_;  // site -> chain position
};

using LatticePtr = std::shared_ptr<const Lattice>;

LatticePtr build_lattice(std::size_t lx, std::size_t ly, bool pbc, Ordering ordering);

}  // namespace tcdmrg
