#include "tcdmrg/lattice.hpp"

#include <cstdlib>
#include <string>

namespace tcdmrg {

Lattice::Lattice(std::size_t lx, std::size_t ly, bool pbc, Ordering ordering)
    : lx_(lx), ly_(ly), pbc_(pbc), ordering_kind_(ordering) {
  if (lx < 1 || ly < 1 || lx * ly < 2)
    throw ConfigError("lattice: need at least 2 sites");
  if (pbc && (lx == 1 || ly == 1))
    throw ConfigError("lattice: periodic wrap along a length-1 direction is a self-bond");

  ordering_.reserve(n_sites());
  for (std::size_t r = 0; r < lx_; ++r) {
    if (ordering_kind_ == Ordering::snake && (r % 2 == 1)) {
      for (std::size_t c = ly_; c-- > 0;) ordering_.push_back(r * ly_ + c);
    } else {
      for (std::size_t c = 0; c < ly_; ++c) ordering_.push_back(r * ly_ + c);
    }
  }
  positions_.assign(n_sites(), 0);
  for (std::size_t p = 0; p < ordering_.size(); ++p) positions_[ordering_[p]] = p;
}

std::size_t Lattice::site_at_position(std::size_t chain_pos) const {
  if (chain_pos >= n_sites()) throw IndexError("lattice: chain position out of range");
  return ordering_[chain_pos];
}

std::size_t Lattice::position_of_site(std::size_t site) const {
  if (site >= n_sites()) throw IndexError("lattice: site out of range");
  return positions_[site];
}

std::vector<Bond> Lattice::bonds() const {
  std::vector<Bond> out;
  for (std::size_t r = 0; r < lx_; ++r) {
    for (std::size_t c = 0; c < ly_; ++c) {
      const std::size_t s = r * ly_ + c;
      if (c + 1 < ly_)
        out.push_back({s, r * ly_ + c + 1, BondDirection::horizontal});
      else if (pbc_)
        out.push_back({s, r * ly_, BondDirection::horizontal});
      if (r + 1 < lx_)
        out.push_back({s, (r + 1) * ly_ + c, BondDirection::vertical});
      else if (pbc_)
        out.push_back({s, c, BondDirection::vertical});
    }
  }
  return out;
}

std::size_t Lattice::chain_distance(std::size_t site_i, std::size_t site_j) const {
  const std::size_t pi = position_of_site(site_i), pj = position_of_site(site_j);
  return pi > pj ? pi - pj : pj - pi;
}

LatticePtr build_lattice(std::size_t lx, std::size_t ly, bool pbc, Ordering ordering) {
  return std::make_shared<const Lattice>(lx, ly, pbc, ordering);
}

}  // namespace tcdmrg
