#include "tcdmrg/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>

#include "tcdmrg/errors.hpp"
#include "tcdmrg/kernels.hpp"

namespace tcdmrg {

namespace {

constexpr double kSingularCutoff = 1e-12;

struct PairShape {
  std::size_t l = 0, w0 = 0, w1 = 0, w2 = 0, r = 0;

  std::size_t dim() const { return l * 16 * r; }
};

PairShape check_pair(const DenseTensor& left_env, const SparseMpoSite& w_left,
                     const SparseMpoSite& w_right,
                     const DenseTensor& right_env) {
  if (left_env.rank() != 3 || right_env.rank() != 3 ||
      left_env.extent(0) != left_env.extent(2) ||
      right_env.extent(0) != right_env.extent(2)) {
    throw DimensionError("effective operator environments must be (b, w, b)");
  }
  if (left_env.extent(1) != w_left.rows || w_left.cols != w_right.rows ||
      right_env.extent(1) != w_right.cols) {
    throw DimensionError("MPO bond extents do not line up across the pair");
  }
  return {left_env.extent(0), w_left.rows, w_left.cols, w_right.cols,
          right_env.extent(0)};
}

void validate_config(const DmrgConfig& cfg) {
  if (cfg.m < 1) throw ConfigError("bond dimension m must be >= 1");
  if (!(cfg.energy_tol > 0.0)) throw ConfigError("energy_tol must be positive");
  if (!(cfg.davidson_tol > 0.0)) {
    throw ConfigError("davidson_tol must be positive");
  }
  if (cfg.davidson_max_subspace < 2) {
    throw ConfigError("davidson_max_subspace must be >= 2");
  }
}

DavidsonConfig davidson_settings(const DmrgConfig& cfg) {
  DavidsonConfig dc;
  dc.tol = cfg.davidson_tol;
  dc.max_subspace = cfg.davidson_max_subspace;
  dc.max_iterations = 300;
  dc.restart_keep = 6;
  return dc;
}

struct PairSplit {
  DenseTensor left;   // (l, 4, keep)
  DenseTensor right;  // (keep, 4, r)
  double discarded = 0.0;
  std::size_t keep = 0;
};

// SVD of the optimized pair vector with relative cutoff and bond cap; the kept
// singular values are rescaled to restore unit norm, and the weight factor
// goes to the tensor on the side the center moves to.
PairSplit split_pair(const std::vector<double>& pair_vec, const PairShape& ps,
                     std::size_t m, Direction direction) {
  DenseTensor a({ps.l * 4, 4 * ps.r});
  std::memcpy(a.data(), pair_vec.data(), pair_vec.size() * sizeof(double));
  const SVDResult f = svd(a);
  const std::size_t full = f.S.size();

  double total = 0.0;
  for (const double s : f.S) total += s * s;
  if (!(total > 0.0)) throw NumericError("optimized pair tensor has zero norm");

  std::size_t keep = 0;
  while (keep < full && keep < m && f.S[keep] > kSingularCutoff * f.S[0]) {
    ++keep;
  }
  if (keep == 0) keep = 1;

  double kept = 0.0;
  for (std::size_t i = 0; i < keep; ++i) kept += f.S[i] * f.S[i];

  PairSplit out;
  out.keep = keep;
  out.discarded = (total - kept) / total;
  const double rescale = 1.0 / std::sqrt(kept);

  DenseTensor u({ps.l * 4, keep});
  for (std::size_t row = 0; row < ps.l * 4; ++row) {
    for (std::size_t c = 0; c < keep; ++c) {
      u[row * keep + c] = f.U[row * full + c];
    }
  }
  DenseTensor vt({keep, 4 * ps.r});
  for (std::size_t c = 0; c < keep; ++c) {
    for (std::size_t col = 0; col < 4 * ps.r; ++col) {
      vt[c * 4 * ps.r + col] = f.Vt[c * 4 * ps.r + col];
    }
  }
  if (direction == Direction::left_to_right) {
    for (std::size_t c = 0; c < keep; ++c) {
      const double w = f.S[c] * rescale;
      kernels::scale(4 * ps.r, w, vt.data() + c * 4 * ps.r);
    }
  } else {
    for (std::size_t row = 0; row < ps.l * 4; ++row) {
      for (std::size_t c = 0; c < keep; ++c) {
        u[row * keep + c] *= f.S[c] * rescale;
      }
    }
  }
  out.left = u.reshape({ps.l, 4, keep});
  out.right = vt.reshape({keep, 4, ps.r});
  return out;
}

std::vector<double> pair_guess(const DenseTensor& a, const DenseTensor& b) {
  const DenseTensor merged = contract(a, b, {{2, 0}});
  std::vector<double> v(merged.size());
  std::memcpy(v.data(), merged.data(), v.size() * sizeof(double));
  return v;
}

}  // namespace

Matvec effective_matvec(const DenseTensor& left_env, const SparseMpoSite& w_left,
                        const SparseMpoSite& w_right,
                        const DenseTensor& right_env) {
  const PairShape ps = check_pair(left_env, w_left, w_right, right_env);

  struct Plan {
    PairShape ps;
    const DenseTensor* left;
    const SparseMpoSite* wl;
    const SparseMpoSite* wr;
    DenseTensor right_t;  // (w2, k_r, b_r)
    std::vector<double> t1, t2, t3;
  };
  auto plan = std::make_shared<Plan>();
  plan->ps = ps;
  plan->left = &left_env;
  plan->wl = &w_left;
  plan->wr = &w_right;
  plan->right_t = right_env.permute({1, 2, 0});
  plan->t1.resize(ps.l * ps.w0 * 16 * ps.r);
  plan->t2.resize(ps.l * ps.w1 * 16 * ps.r);
  plan->t3.resize(ps.l * 16 * ps.w2 * ps.r);

  return [plan](const double* x, double* y) {
    const PairShape& s = plan->ps;
    const std::size_t l = s.l, w0 = s.w0, w1 = s.w1, w2 = s.w2, r = s.r;

    // t1[b, w0, s0', s1', k_r] = sum_k L[b, w0, k] x[k, s0', s1', k_r]
    matmul(l * w0, l, 16 * r, plan->left->data(), x, plan->t1.data());

    // t2[b, w1, s0, s1', k_r] += v * t1[b, w0, s0_in, s1', k_r]
    std::fill(plan->t2.begin(), plan->t2.end(), 0.0);
    for (const auto& block : plan->wl->blocks) {
      for (const auto& e : block.elems) {
        const double* src =
            plan->t1.data() +
            (block.vl * 4 + static_cast<std::size_t>(e.s_in)) * 4 * r;
        double* dst =
            plan->t2.data() +
            (block.vr * 4 + static_cast<std::size_t>(e.s_out)) * 4 * r;
        for (std::size_t b = 0; b < l; ++b) {
          kernels::axpy(4 * r, e.value, src + b * w0 * 16 * r,
                        dst + b * w1 * 16 * r);
        }
      }
    }

    // t3[b, s0, s1, w2, k_r] += v * t2[b, w1, s0, s1_in, k_r]
    std::fill(plan->t3.begin(), plan->t3.end(), 0.0);
    for (const auto& block : plan->wr->blocks) {
      for (const auto& e : block.elems) {
        for (std::size_t b = 0; b < l; ++b) {
          const double* src =
              plan->t2.data() +
              ((b * w1 + block.vl) * 16 + static_cast<std::size_t>(e.s_in)) * r;
          double* dst =
              plan->t3.data() +
              ((b * 16 + static_cast<std::size_t>(e.s_out)) * w2 + block.vr) * r;
          for (std::size_t s0 = 0; s0 < 4; ++s0) {
            kernels::axpy(r, e.value, src + s0 * 4 * r, dst + s0 * 4 * w2 * r);
          }
        }
      }
    }

    // y[b, s0, s1, b_r] = sum_{w2, k_r} t3[b, s0, s1, w2, k_r] R[b_r, w2, k_r]
    matmul(l * 16, w2 * r, r, plan->t3.data(), plan->right_t.data(), y);
  };
}

std::vector<double> effective_diagonal(const DenseTensor& left_env,
                                       const SparseMpoSite& w_left,
                                       const SparseMpoSite& w_right,
                                       const DenseTensor& right_env) {
  const PairShape ps = check_pair(left_env, w_left, w_right, right_env);
  const std::size_t l = ps.l, w0 = ps.w0, w1 = ps.w1, w2 = ps.w2, r = ps.r;

  std::vector<double> ld(l * w0);  // (b_l, w0)
  for (std::size_t b = 0; b < l; ++b) {
    for (std::size_t w = 0; w < w0; ++w) {
      ld[b * w0 + w] = left_env[(b * w0 + w) * l + b];
    }
  }
  std::vector<double> rd(w2 * r);  // (w2, b_r)
  for (std::size_t b = 0; b < r; ++b) {
    for (std::size_t w = 0; w < w2; ++w) {
      rd[w * r + b] = right_env[(b * w2 + w) * r + b];
    }
  }

  std::vector<double> dl(w0 * 4 * w1, 0.0);  // (w0, s0, w1)
  for (const auto& block : w_left.blocks) {
    for (const auto& e : block.elems) {
      if (e.s_out == e.s_in) {
        dl[(block.vl * 4 + static_cast<std::size_t>(e.s_in)) * w1 + block.vr] +=
            e.value;
      }
    }
  }
  std::vector<double> dr(w1 * 4 * w2, 0.0);  // (w1, s1, w2)
  for (const auto& block : w_right.blocks) {
    for (const auto& e : block.elems) {
      if (e.s_out == e.s_in) {
        dr[(block.vl * 4 + static_cast<std::size_t>(e.s_in)) * w2 + block.vr] +=
            e.value;
      }
    }
  }

  std::vector<double> t1(w0 * 16 * w2);  // (w0, s0, s1, w2)
  matmul(w0 * 4, w1, 4 * w2, dl.data(), dr.data(), t1.data());
  std::vector<double> t2(w0 * 16 * r);  // (w0, s0, s1, b_r)
  matmul(w0 * 16, w2, r, t1.data(), rd.data(), t2.data());

  std::vector<double> diag(ps.dim());  // (b_l, s0, s1, b_r)
  matmul(l, w0, 16 * r, ld.data(), t2.data(), diag.data(), false);
  return diag;
}

std::pair<MPS, SweepRecord> two_site_sweep(const MPS& state,
                                           const NumericMPO& mpo,
                                           const DmrgConfig& cfg,
                                           Direction direction) {
  validate_config(cfg);
  const std::size_t n = state.n_sites();
  if (n < 2) throw DimensionError("two-site sweep needs at least two sites");
  if (mpo.tensors.size() != n) {
    throw DimensionError("MPO and MPS chain lengths differ");
  }

  const std::size_t start_center =
      direction == Direction::left_to_right ? 0 : n - 1;
  MPS out = state.center == static_cast<std::ptrdiff_t>(start_center)
                ? state
                : canonicalize(state, start_center);
  const auto sparse = sparsify(mpo);
  const DavidsonConfig dc = davidson_settings(cfg);

  std::vector<DenseTensor> left(n + 1, boundary_environment());
  std::vector<DenseTensor> right(n + 1, boundary_environment());
  if (direction == Direction::left_to_right) {
    for (std::size_t j = n; j-- > 2;) {
      right[j] = env_step_right(right[j + 1], out.tensors[j], sparse[j],
                                out.tensors[j]);
    }
  } else {
    for (std::size_t j = 0; j + 2 < n; ++j) {
      left[j + 1] =
          env_step_left(left[j], out.tensors[j], sparse[j], out.tensors[j]);
    }
  }

  SweepRecord record;
  const std::size_t pairs = n - 1;
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t i = direction == Direction::left_to_right ? p : n - 2 - p;
    const auto matvec =
        effective_matvec(left[i], sparse[i], sparse[i + 1], right[i + 2]);
    const auto diag =
        effective_diagonal(left[i], sparse[i], sparse[i + 1], right[i + 2]);
    const PairShape ps = {out.tensors[i].extent(0), sparse[i].rows,
                          sparse[i].cols, sparse[i + 1].cols,
                          out.tensors[i + 1].extent(2)};
    const auto guess = pair_guess(out.tensors[i], out.tensors[i + 1]);

    DavidsonResult solved;
    try {
      solved = davidson(matvec, ps.dim(), guess, diag, dc);
    } catch (const SolverError& err) {
      std::ostringstream msg;
      msg << "sweep aborted at pair (" << i << ", " << i + 1
          << "): " << err.what();
      throw SolverError(msg.str(), err.last_residual);
    }
    record.energy = solved.eigenvalue;

    const PairSplit split = split_pair(solved.vector, ps, cfg.m, direction);
    out.tensors[i] = split.left;
    out.tensors[i + 1] = split.right;
    record.discarded_weight += split.discarded;
    record.max_bond = std::max(record.max_bond, split.keep);

    if (direction == Direction::left_to_right) {
      out.center = static_cast<std::ptrdiff_t>(i + 1);
      left[i + 1] =
          env_step_left(left[i], out.tensors[i], sparse[i], out.tensors[i]);
    } else {
      out.center = static_cast<std::ptrdiff_t>(i);
      right[i + 1] = env_step_right(right[i + 2], out.tensors[i + 1],
                                    sparse[i + 1], out.tensors[i + 1]);
    }
  }
  return {std::move(out), record};
}

RunResult run_ground_state(const LatticePtr& lattice, const ModelParams& params,
                           const DmrgConfig& cfg) {
  validate_config(cfg);
  if (!lattice) throw ConfigError("run_ground_state needs a lattice");
  if (cfg.max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");

  const auto penalized = build_mpo(assemble(lattice, params));
  const auto bare = build_mpo(canonicalize(tc_hubbard(lattice, params)));
  const auto count_up = build_mpo(canonicalize(total_number(lattice, Spin::up)));
  const auto count_down =
      build_mpo(canonicalize(total_number(lattice, Spin::down)));

  RunResult result;
  result.state = random_mps(*lattice, std::min<std::size_t>(cfg.m, 16), cfg.seed);

  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    auto [after_lr, rec_lr] =
        two_site_sweep(result.state, penalized.numeric, cfg,
                       Direction::left_to_right);
    auto [after_rl, rec_rl] = two_site_sweep(after_lr, penalized.numeric, cfg,
                                             Direction::right_to_left);
    result.state = std::move(after_rl);

    SweepRecord rec;
    rec.energy = rec_rl.energy;
    rec.discarded_weight = rec_lr.discarded_weight + rec_rl.discarded_weight;
    rec.max_bond = std::max(rec_lr.max_bond, rec_rl.max_bond);
    rec.n_up = expectation(result.state, count_up.numeric);
    rec.n_down = expectation(result.state, count_down.numeric);
    result.sweeps.push_back(rec);

    if (result.sweeps.size() >= 2) {
      const double e_now = rec.energy;
      const double e_prev = result.sweeps[result.sweeps.size() - 2].energy;
      const double scale = std::max(std::abs(e_now), 1e-12);
      if (std::abs(e_now - e_prev) <= cfg.energy_tol * scale) {
        result.converged = true;
        break;
      }
    }
  }

  result.final_pair_energy = result.sweeps.back().energy;
  result.energy = expectation(result.state, bare.numeric);
  result.n_up = result.sweeps.back().n_up;
  result.n_down = result.sweeps.back().n_down;

  result.bond_profile.assign(1, 1);
  for (const auto& t : result.state.tensors) {
    result.bond_profile.push_back(t.extent(2));
  }

  if (!result.converged) {
    result.diagnostic = "energy did not settle within the sweep limit";
  }
  const double up_err = std::abs(result.n_up - double(params.n_alpha));
  const double down_err = std::abs(result.n_down - double(params.n_beta));
  if (up_err >= 1e-6 || down_err >= 1e-6) {
    result.converged = false;
    std::ostringstream msg;
    msg << "filling drifted from its target: <N_up> = " << result.n_up
        << " (want " << params.n_alpha << "), <N_dn> = " << result.n_down
        << " (want " << params.n_beta << ")";
    result.diagnostic = msg.str();
  }
  return result;
}

}  // namespace tcdmrg
