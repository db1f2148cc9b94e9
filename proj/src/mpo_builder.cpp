#include "tcdmrg/mpo_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>

#include "tcdmrg/errors.hpp"
#include "tcdmrg/lattice.hpp"

namespace tcdmrg {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kWeightEps = 1e-14;

std::vector<std::vector<std::size_t>> adjacency(const BipartiteGraph& graph) {
  std::vector<std::vector<std::size_t>> adj(graph.n_left);
  for (const auto& e : graph.edges) {
    if (e.left >= graph.n_left || e.right >= graph.n_right) {
      throw IndexError("bipartite edge endpoint out of range");
    }
    adj[e.left].push_back(e.right);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

// One BFS/DFS phase of Hopcroft-Karp; returns true when an augmenting path
// exists for the given matching.
bool augment_phase(const std::vector<std::vector<std::size_t>>& adj,
                   std::vector<std::size_t>& match_l,
                   std::vector<std::size_t>& match_r) {
  const std::size_t n_left = match_l.size();
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(n_left, kInf);
  std::deque<std::size_t> queue;
  for (std::size_t u = 0; u < n_left; ++u) {
    if (match_l[u] == kNone) {
      dist[u] = 0;
      queue.push_back(u);
    }
  }
  bool reachable_free_right = false;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adj[u]) {
      const std::size_t w = match_r[v];
      if (w == kNone) {
        reachable_free_right = true;
      } else if (dist[w] == kInf) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  if (!reachable_free_right) return false;

  std::function<bool(std::size_t)> try_augment = [&](std::size_t u) {
    for (std::size_t v : adj[u]) {
      const std::size_t w = match_r[v];
      if (w == kNone || (dist[w] == dist[u] + 1 && try_augment(w))) {
        match_l[u] = v;
        match_r[v] = u;
        return true;
      }
    }
    dist[u] = kInf;
    return false;
  };
  bool augmented = false;
  for (std::size_t u = 0; u < n_left; ++u) {
    if (match_l[u] == kNone && try_augment(u)) augmented = true;
  }
  return augmented;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> hopcroft_karp(
    const BipartiteGraph& graph) {
  const auto adj = adjacency(graph);
  std::vector<std::size_t> match_l(graph.n_left, kNone);
  std::vector<std::size_t> match_r(graph.n_right, kNone);
  while (augment_phase(adj, match_l, match_r)) {
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t u = 0; u < graph.n_left; ++u) {
    if (match_l[u] != kNone) pairs.emplace_back(u, match_l[u]);
  }
  return pairs;
}

VertexCover min_vertex_cover(
    const BipartiteGraph& graph,
    const std::vector<std::pair<std::size_t, std::size_t>>& matching) {
  const auto adj = adjacency(graph);
  std::vector<std::size_t> match_l(graph.n_left, kNone);
  std::vector<std::size_t> match_r(graph.n_right, kNone);
  for (const auto& [u, v] : matching) {
    if (u >= graph.n_left || v >= graph.n_right) {
      throw ContractViolationError("matching pair out of range");
    }
    if (!std::binary_search(adj[u].begin(), adj[u].end(), v)) {
      throw ContractViolationError("matching pair is not a graph edge");
    }
    if (match_l[u] != kNone || match_r[v] != kNone) {
      throw ContractViolationError("matching reuses a vertex");
    }
    match_l[u] = v;
    match_r[v] = u;
  }
  {
    auto probe_l = match_l;
    auto probe_r = match_r;
    if (augment_phase(adj, probe_l, probe_r)) {
      throw ContractViolationError(
          "matching is not maximum: an augmenting path exists");
    }
  }

  // Koenig: alternate from unmatched left vertices (non-matching edges
  // left->right, matching edges right->left); the cover is the unreached left
  // side plus the reached right side.
  std::vector<char> seen_l(graph.n_left, 0), seen_r(graph.n_right, 0);
  std::deque<std::size_t> queue;
  for (std::size_t u = 0; u < graph.n_left; ++u) {
    if (match_l[u] == kNone) {
      seen_l[u] = 1;
      queue.push_back(u);
    }
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adj[u]) {
      if (match_l[u] == v || seen_r[v]) continue;
      seen_r[v] = 1;
      const std::size_t w = match_r[v];
      if (w != kNone && !seen_l[w]) {
        seen_l[w] = 1;
        queue.push_back(w);
      }
    }
  }
  VertexCover cover;
  for (std::size_t u = 0; u < graph.n_left; ++u) {
    if (!seen_l[u] && match_l[u] != kNone) cover.left.push_back(u);
  }
  for (std::size_t v = 0; v < graph.n_right; ++v) {
    if (seen_r[v]) cover.right.push_back(v);
  }
  return cover;
}

namespace {

struct InternTable {
  std::map<std::string, std::size_t> ids;
  std::vector<LocalOp> ops;

  std::size_t intern(const LocalOp& op) {
    std::string key(reinterpret_cast<const char*>(op.m.data()),
                    op.m.size() * sizeof(double));
    key.push_back(op.parity_odd ? '\1' : '\0');
    auto [it, fresh] = ids.try_emplace(key, ops.size());
    if (fresh) ops.push_back(op);
    return it->second;
  }
};

using Factors = std::vector<std::pair<std::size_t, std::size_t>>;  // (pos, op)

struct ActiveTerm {
  double gamma;
  Factors factors;
  std::size_t cursor = 0;  // first factor not yet consumed
  std::size_t strand = 0;
};

std::string suffix_key(const Factors& factors, std::size_t from) {
  std::ostringstream out;
  for (std::size_t k = from; k < factors.size(); ++k) {
    out << factors[k].first << ':' << factors[k].second << ';';
  }
  return out.str();
}

MpoBuildResult finalize_numeric(SymbolicMPO symbolic,
                                std::vector<std::size_t> bond_profile) {
  NumericMPO numeric;
  numeric.tensors.reserve(symbolic.sites.size());
  for (const auto& site : symbolic.sites) {
    DenseTensor w({site.row_keys.size(), 4, 4, site.col_keys.size()});
    for (const auto& [rc, entries] : site.cells) {
      const auto [row, col] = rc;
      for (const auto& entry : entries) {
        const LocalOp& op = symbolic.op_table[entry.op_id];
        for (std::size_t a = 0; a < 4; ++a) {
          for (std::size_t b = 0; b < 4; ++b) {
            w.at({row, a, b, col}) += entry.prefactor * op.at(a, b);
          }
        }
      }
    }
    numeric.tensors.push_back(std::move(w));
  }
  return MpoBuildResult{std::move(symbolic), std::move(numeric),
                        std::move(bond_profile)};
}

}  // namespace

MpoBuildResult build_mpo(const SOPOperator& op) {
  if (!op.lattice) throw ConfigError("operator has no lattice");
  const std::size_t n = op.lattice->n_sites();

  InternTable interned;
  const std::size_t id_identity = interned.intern(local_identity());

  std::vector<ActiveTerm> terms;
  terms.reserve(op.terms.size());
  for (const auto& term : op.terms) {
    if (std::abs(term.coeff) < kWeightEps) continue;
    auto site_factors = term_to_site_factors(term, *op.lattice);
    Factors factors;
    factors.reserve(site_factors.size());
    for (const auto& [pos, local] : site_factors) {
      factors.emplace_back(pos, interned.intern(local));
    }
    terms.push_back(ActiveTerm{term.coeff, std::move(factors), 0, 0});
  }

  SymbolicMPO symbolic;
  symbolic.sites.resize(n);
  std::vector<std::size_t> bond_profile{1};

  const bool empty_operator = terms.empty();
  if (empty_operator) {
    // Identity chain scaled by zero: same shape as the identity MPO, zero
    // prefactor on the first site.
    for (std::size_t i = 0; i < n; ++i) {
      auto& site = symbolic.sites[i];
      site.row_keys = {i == 0 ? std::string() : "I"};
      site.col_keys = {i + 1 == n ? std::string() : "I"};
      site.cells[{0, 0}] = {SymbolicEntry{id_identity, i == 0 ? 0.0 : 1.0}};
      bond_profile.push_back(1);
    }
    symbolic.op_table = interned.ops;
    return finalize_numeric(std::move(symbolic), std::move(bond_profile));
  }

  std::vector<std::string> strand_keys{std::string()};

  for (std::size_t i = 0; i < n; ++i) {
    auto& site = symbolic.sites[i];
    site.row_keys = strand_keys;

    if (i + 1 == n) {
      site.col_keys = {std::string()};
      for (auto& t : terms) {
        std::size_t z = id_identity;
        if (t.cursor < t.factors.size() && t.factors[t.cursor].first == i) {
          z = t.factors[t.cursor].second;
          ++t.cursor;
        }
        if (t.cursor != t.factors.size()) {
          throw ContractViolationError("term extends past the last site");
        }
        site.cells[{t.strand, 0}].push_back(SymbolicEntry{z, t.gamma});
      }
      bond_profile.push_back(1);
      break;
    }

    struct LeftVertex {
      std::string key;
      std::size_t parent, z;
    };
    struct RightVertex {
      std::string key;
      Factors remainder;
    };
    std::map<std::string, std::size_t> left_ids, right_ids;
    std::vector<LeftVertex> lefts;
    std::vector<RightVertex> rights;
    struct TermRoute {
      std::size_t left, right;
      bool consumed_site_factor;
    };
    std::vector<TermRoute> routes(terms.size());

    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
      auto& t = terms[ti];
      std::size_t z = id_identity;
      bool consumed = false;
      if (t.cursor < t.factors.size() && t.factors[t.cursor].first == i) {
        z = t.factors[t.cursor].second;
        consumed = true;
      }
      std::string lkey = strand_keys[t.strand];
      lkey += '|';
      lkey += std::to_string(i);
      lkey += ':';
      lkey += std::to_string(z);
      auto [lit, lfresh] = left_ids.try_emplace(lkey, lefts.size());
      if (lfresh) lefts.push_back(LeftVertex{lkey, t.strand, z});

      const std::size_t rem_from = t.cursor + (consumed ? 1 : 0);
      std::string rkey = suffix_key(t.factors, rem_from);
      auto [rit, rfresh] = right_ids.try_emplace(rkey, rights.size());
      if (rfresh) {
        rights.push_back(RightVertex{
            rkey, Factors(t.factors.begin() + static_cast<std::ptrdiff_t>(rem_from),
                          t.factors.end())});
      }
      routes[ti] = TermRoute{lit->second, rit->second, consumed};
    }

    // Canonical vertex order: lexicographic by key on both sides, so the
    // matching, cover, and column layout are reproducible.
    std::vector<std::size_t> lorder(lefts.size()), rorder(rights.size());
    {
      std::vector<std::size_t> lrank(lefts.size()), rrank(rights.size());
      std::size_t idx = 0;
      for (const auto& [key, old_id] : left_ids) {
        (void)key;
        lrank[old_id] = idx;
        lorder[idx] = old_id;
        ++idx;
      }
      idx = 0;
      for (const auto& [key, old_id] : right_ids) {
        (void)key;
        rrank[old_id] = idx;
        rorder[idx] = old_id;
        ++idx;
      }
      for (auto& route : routes) {
        route.left = lrank[route.left];
        route.right = rrank[route.right];
      }
    }
    auto left_at = [&](std::size_t id) -> const LeftVertex& {
      return lefts[lorder[id]];
    };
    auto right_at = [&](std::size_t id) -> const RightVertex& {
      return rights[rorder[id]];
    };

    std::map<std::pair<std::size_t, std::size_t>, double> edge_weights;
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
      edge_weights[{routes[ti].left, routes[ti].right}] += terms[ti].gamma;
    }

    BipartiteGraph graph;
    graph.n_left = lefts.size();
    graph.n_right = rights.size();
    for (const auto& [lr, w] : edge_weights) {
      if (std::abs(w) < kWeightEps) continue;
      graph.edges.push_back(BipartiteGraph::Edge{lr.first, lr.second, w});
    }

    const auto matching = hopcroft_karp(graph);
    const auto cover = min_vertex_cover(graph, matching);

    std::vector<std::size_t> left_col(lefts.size(), kNone);
    std::vector<std::size_t> right_col(rights.size(), kNone);
    std::vector<std::string> new_keys;
    for (std::size_t l : cover.left) {
      left_col[l] = new_keys.size();
      new_keys.push_back(left_at(l).key);
    }
    std::size_t comp_serial = 0;
    for (std::size_t r : cover.right) {
      right_col[r] = new_keys.size();
      new_keys.push_back("C" + std::to_string(i + 1) + "#" +
                         std::to_string(comp_serial++));
    }
    if (new_keys.empty()) {
      // Every surviving edge cancelled; continue as a zero operator on a
      // width-1 bond with no cells.
      new_keys.push_back("Z" + std::to_string(i + 1));
      terms.clear();
    }

    for (std::size_t l : cover.left) {
      site.cells[{left_at(l).parent, left_col[l]}].push_back(
          SymbolicEntry{left_at(l).z, 1.0});
    }
    for (const auto& e : graph.edges) {
      if (left_col[e.left] != kNone) continue;
      if (right_col[e.right] == kNone) {
        throw ContractViolationError("edge escaped the vertex cover");
      }
      site.cells[{left_at(e.left).parent, right_col[e.right]}].push_back(
          SymbolicEntry{left_at(e.left).z, e.weight});
    }

    std::vector<ActiveTerm> next_terms;
    next_terms.reserve(terms.size());
    for (std::size_t l : cover.left) {
      for (std::size_t ti = 0; ti < terms.size(); ++ti) {
        if (routes[ti].left != l) continue;
        if (std::abs(edge_weights.at({routes[ti].left, routes[ti].right})) <
            kWeightEps) {
          continue;
        }
        ActiveTerm t = std::move(terms[ti]);
        if (routes[ti].consumed_site_factor) ++t.cursor;
        t.strand = left_col[l];
        next_terms.push_back(std::move(t));
      }
    }
    for (std::size_t r : cover.right) {
      next_terms.push_back(
          ActiveTerm{1.0, right_at(r).remainder, 0, right_col[r]});
    }
    terms = std::move(next_terms);
    strand_keys = std::move(new_keys);
    site.col_keys = strand_keys;
    bond_profile.push_back(strand_keys.size());
  }

  symbolic.op_table = interned.ops;
  return finalize_numeric(std::move(symbolic), std::move(bond_profile));
}

std::size_t unfolding_generic_rank(const SOPOperator& op, std::size_t cut) {
  if (!op.lattice) throw ConfigError("operator has no lattice attached");
  const std::size_t n = op.lattice->n_sites();
  if (cut > n) throw IndexError("unfolding cut past the end of the chain");
  const SOPOperator canon = canonicalize(op);

  std::map<std::string, std::size_t> left_ids, right_ids;
  std::map<std::pair<std::size_t, std::size_t>, double> gamma;
  for (const auto& term : canon.terms) {
    const auto factors = term_to_site_factors(term, *canon.lattice);
    std::string lkey, rkey;
    for (const auto& [pos, fac] : factors) {
      std::string piece = std::to_string(pos);
      piece.push_back(':');
      piece.append(reinterpret_cast<const char*>(fac.m.data()),
                   fac.m.size() * sizeof(double));
      piece.push_back(fac.parity_odd ? '\1' : '\0');
      piece.push_back(';');
      (pos < cut ? lkey : rkey) += piece;
    }
    const std::size_t li =
        left_ids.try_emplace(lkey, left_ids.size()).first->second;
    const std::size_t ri =
        right_ids.try_emplace(rkey, right_ids.size()).first->second;
    gamma[{li, ri}] += term.coeff;
  }

  BipartiteGraph graph;
  graph.n_left = left_ids.size();
  graph.n_right = right_ids.size();
  for (const auto& [pair, weight] : gamma) {
    if (std::abs(weight) < 1e-14) continue;
    graph.edges.push_back({pair.first, pair.second, weight});
  }
  return hopcroft_karp(graph).size();
}

MpoStats mpo_stats(const NumericMPO& mpo) {
  MpoStats stats;
  if (mpo.tensors.empty()) return stats;
  stats.bonds.push_back(mpo.tensors.front().extent(0));
  std::size_t nonzero = 0, total = 0;
  for (const auto& w : mpo.tensors) {
    stats.bonds.push_back(w.extent(3));
    total += w.size();
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] != 0.0) ++nonzero;
    }
  }
  stats.max_bond = *std::max_element(stats.bonds.begin(), stats.bonds.end());
  stats.nonzero_density =
      total == 0 ? 0.0 : static_cast<double>(nonzero) / static_cast<double>(total);
  return stats;
}

double fh_bond_bound(std::size_t n_sites) {
  const double h = static_cast<double>(n_sites) / 2.0;
  return 2.0 * h * h + 3.0 * h + 4.0;
}

double tc_bond_bound(std::size_t n_sites) {
  const double h = static_cast<double>(n_sites) / 2.0;
  return 4.0 * h * h + 3.0 * h + 2.0;
}

std::vector<SparseMpoSite> sparsify(const NumericMPO& mpo) {
  std::vector<SparseMpoSite> sites;
  sites.reserve(mpo.tensors.size());
  for (const auto& w : mpo.tensors) {
    if (w.rank() != 4 || w.extent(1) != 4 || w.extent(2) != 4) {
      throw DimensionError("MPO site tensor must have shape (vl, 4, 4, vr)");
    }
    SparseMpoSite site;
    site.rows = w.extent(0);
    site.cols = w.extent(3);
    for (std::size_t vl = 0; vl < site.rows; ++vl) {
      for (std::size_t vr = 0; vr < site.cols; ++vr) {
        SparseBlock block{vl, vr, {}};
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            const double v = w.at({vl, static_cast<std::size_t>(a),
                                   static_cast<std::size_t>(b), vr});
            if (v != 0.0) block.elems.push_back(SparseElem{a, b, v});
          }
        }
        if (!block.elems.empty()) site.blocks.push_back(std::move(block));
      }
    }
    sites.push_back(std::move(site));
  }
  return sites;
}

}  // namespace tcdmrg
