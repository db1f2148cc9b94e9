#include "tcdmrg/hamiltonians.hpp"

#include <cmath>

#include "tcdmrg/errors.hpp"

namespace tcdmrg {

namespace {

constexpr double kCoeffEps = 1e-14;

void validate(const LatticePtr& lattice, const ModelParams& params) {
  if (!lattice) throw ConfigError("model: lattice is null");
  if (!(params.u >= 0.0)) throw ConfigError("model: u must be >= 0");
  if (params.n_alpha > lattice->n_sites())
    throw ConfigError("model: n_alpha exceeds the site count");
  if (params.n_beta > lattice->n_sites())
    throw ConfigError("model: n_beta exceeds the site count");
  if (!std::isfinite(params.t) || !std::isfinite(params.j))
    throw ConfigError("model: t and j must be finite");
}

void add_hop(SOPOperator& op, double coeff, std::size_t i, std::size_t j, Spin s) {
  if (std::abs(coeff) < kCoeffEps) return;
  add_term(op, coeff, {{i, s, true}, {j, s, false}});
}

void add_density(std::vector<LadderOp>& ops, std::size_t site, Spin s) {
  ops.push_back({site, s, true});
  ops.push_back({site, s, false});
}

}  // namespace

double default_penalty_lambda(const ModelParams& params) {
  return std::max(2.0 * params.u, 10.0 * std::abs(params.t));
}

SOPOperator hubbard(const LatticePtr& lattice, const ModelParams& params) {
  validate(lattice, params);
  SOPOperator op;
  op.lattice = lattice;
  for (const Bond& bond : lattice->bonds())
    for (Spin s : {Spin::up, Spin::down}) {
      add_hop(op, -params.t, bond.a, bond.b, s);
      add_hop(op, -params.t, bond.b, bond.a, s);
    }
  if (std::abs(params.u) >= kCoeffEps)
    for (std::size_t site = 0; site < lattice->n_sites(); ++site) {
      std::vector<LadderOp> ops;
      add_density(ops, site, Spin::up);
      add_density(ops, site, Spin::down);
      add_term(op, params.u, std::move(ops));
    }
  return op;
}

SOPOperator tc_hubbard(const LatticePtr& lattice, const ModelParams& params) {
  SOPOperator op = hubbard(lattice, params);
  const double t = params.t;
  const double j = params.j;
  const double c_target = -t * (std::exp(j) - 1.0);   // dresses the destination site
  const double c_source = -t * (std::exp(-j) - 1.0);  // dresses the origin site
  const double c_both = 2.0 * t * (std::cosh(j) - 1.0);

  for (const Bond& bond : lattice->bonds())
    for (const auto& [i, jj] : {std::pair{bond.a, bond.b}, std::pair{bond.b, bond.a}})
      for (Spin s : {Spin::up, Spin::down}) {
        const Spin sbar = other(s);
        if (std::abs(c_target) >= kCoeffEps) {
          std::vector<LadderOp> ops{{i, s, true}, {jj, s, false}};
          add_density(ops, jj, sbar);
          add_term(op, c_target, std::move(ops));
        }
        if (std::abs(c_source) >= kCoeffEps) {
          std::vector<LadderOp> ops{{i, s, true}, {jj, s, false}};
          add_density(ops, i, sbar);
          add_term(op, c_source, std::move(ops));
        }
        if (std::abs(c_both) >= kCoeffEps) {
          std::vector<LadderOp> ops{{i, s, true}, {jj, s, false}};
          add_density(ops, i, sbar);
          add_density(ops, jj, sbar);
          add_term(op, c_both, std::move(ops));
        }
      }
  return op;
}

SOPOperator number_penalty(const LatticePtr& lattice, const ModelParams& params) {
  validate(lattice, params);
  if (!(params.penalty_lambda >= 0.0))
    throw ConfigError("model: penalty_lambda must be >= 0");
  SOPOperator op;
  op.lattice = lattice;
  const double lambda = params.penalty_lambda;
  if (lambda < kCoeffEps) return op;

  const std::size_t n = lattice->n_sites();
  const auto targets = {std::pair{Spin::up, double(params.n_alpha)},
                        std::pair{Spin::down, double(params.n_beta)}};

  double constant = 0.0;
  for (const auto& [s, target] : targets) {
    constant += lambda * target * target;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<LadderOp> ops;
      add_density(ops, i, s);
      add_term(op, lambda * (1.0 - 2.0 * target), std::move(ops));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t jj = i + 1; jj < n; ++jj) {
        std::vector<LadderOp> ops;
        add_density(ops, i, s);
        add_density(ops, jj, s);
        add_term(op, 2.0 * lambda, std::move(ops));
      }
  }
  if (std::abs(constant) >= kCoeffEps) add_term(op, constant, {});
  return op;
}

SOPOperator assemble(const LatticePtr& lattice, const ModelParams& params) {
  return canonicalize(sum(tc_hubbard(lattice, params), number_penalty(lattice, params)));
}

SOPOperator total_number(const LatticePtr& lattice, Spin spin) {
  if (!lattice) throw ConfigError("model: lattice is null");
  SOPOperator op;
  op.lattice = lattice;
  for (std::size_t i = 0; i < lattice->n_sites(); ++i) {
    std::vector<LadderOp> ops;
    add_density(ops, i, spin);
    add_term(op, 1.0, std::move(ops));
  }
  return op;
}

}  // namespace tcdmrg
