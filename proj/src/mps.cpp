#include "tcdmrg/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "tcdmrg/errors.hpp"
#include "tcdmrg/kernels.hpp"

namespace tcdmrg {

namespace {

std::size_t pow4_capped(std::size_t k, std::size_t cap) {
  std::size_t p = 1;
  while (k-- > 0) {
    p *= 4;
    if (p >= cap) return cap;
  }
  return p;
}

void check_site_tensor(const DenseTensor& a) {
  if (a.rank() != 3 || a.extent(1) != 4) {
    throw DimensionError("MPS site tensor must have shape (l, 4, r)");
  }
}

}  // namespace

MPS random_mps(const Lattice& lattice, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("bond dimension m must be >= 1");
  const std::size_t n = lattice.n_sites();
  std::vector<std::size_t> bond(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    bond[k] = std::min(pow4_capped(k, m), pow4_capped(n - k, m));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  MPS state;
  state.tensors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    DenseTensor a({bond[i], 4, bond[i + 1]});
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = dist(rng);
    state.tensors.push_back(std::move(a));
  }
  state = canonicalize(state, 0);
  const double nrm = state.tensors[0].frobenius_norm();
  if (nrm <= 0.0) throw NumericError("random state collapsed to zero norm");
  kernels::scale(state.tensors[0].size(), 1.0 / nrm, state.tensors[0].data());
  return state;
}

MPS canonicalize(const MPS& state, std::size_t center) {
  const std::size_t n = state.n_sites();
  if (n == 0) throw DimensionError("empty MPS");
  if (center >= n) throw IndexError("canonical center out of range");
  for (const auto& a : state.tensors) check_site_tensor(a);

  if (state.tensors.front().extent(0) != 1 ||
      state.tensors.back().extent(2) != 1) {
    throw DimensionError("MPS boundary bonds must have extent 1");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (state.tensors[i].extent(2) != state.tensors[i + 1].extent(0)) {
      throw DimensionError("MPS bond extents disagree between sites");
    }
  }

  MPS out = state;
  for (std::size_t i = 0; i < center; ++i) {
    DenseTensor& a = out.tensors[i];
    const std::size_t l = a.extent(0), r = a.extent(2);
    auto [q, rr] = qr_factor(a.reshape({l * 4, r}));
    const std::size_t rank = q.extent(1);
    out.tensors[i] = q.reshape({l, 4, rank});
    DenseTensor& b = out.tensors[i + 1];
    const std::size_t r2 = b.extent(2);
    DenseTensor merged({rank, 4, r2});
    matmul(rank, r, 4 * r2, rr.data(), b.data(), merged.data());
    out.tensors[i + 1] = std::move(merged);
  }
  for (std::size_t i = n - 1; i > center; --i) {
    DenseTensor& a = out.tensors[i];
    const std::size_t l = a.extent(0), r = a.extent(2);
    auto [ll, q] = lq_factor(a.reshape({l, 4 * r}));
    const std::size_t rank = q.extent(0);
    out.tensors[i] = q.reshape({rank, 4, r});
    DenseTensor& b = out.tensors[i - 1];
    const std::size_t l2 = b.extent(0);
    DenseTensor merged({l2, 4, rank});
    matmul(l2 * 4, l, rank, b.data(), ll.data(), merged.data());
    out.tensors[i - 1] = std::move(merged);
  }
  out.center = static_cast<std::ptrdiff_t>(center);
  return out;
}

double overlap(const MPS& a, const MPS& b) {
  const std::size_t n = a.n_sites();
  if (n != b.n_sites()) throw DimensionError("overlap of different chains");
  DenseTensor t({1, 1});
  t[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    check_site_tensor(a.tensors[i]);
    check_site_tensor(b.tensors[i]);
    const DenseTensor tmp = contract(t, b.tensors[i], {{1, 0}});
    t = contract(a.tensors[i], tmp, {{0, 0}, {1, 1}});
  }
  return t[0];
}

double norm(const MPS& state) {
  return std::sqrt(std::max(0.0, overlap(state, state)));
}

DenseTensor boundary_environment() {
  DenseTensor e({1, 1, 1});
  e[0] = 1.0;
  return e;
}

DenseTensor env_step_left(const DenseTensor& env, const DenseTensor& bra,
                          const SparseMpoSite& op, const DenseTensor& ket) {
  check_site_tensor(bra);
  check_site_tensor(ket);
  const std::size_t bb = bra.extent(0), b2 = bra.extent(2);
  const std::size_t kk = ket.extent(0), k2 = ket.extent(2);
  if (env.rank() != 3 || env.extent(0) != bb || env.extent(1) != op.rows ||
      env.extent(2) != kk) {
    throw DimensionError("left environment extents do not match the site");
  }
  const std::size_t w = op.rows, w2 = op.cols;

  // t1[b, w, s, k2] = sum_k env[b, w, k] * ket[k, s, k2]
  DenseTensor t1({bb, w, 4, k2});
  matmul(bb * w, kk, 4 * k2, env.data(), ket.data(), t1.data());

  // t2[b, s_out, w2, k2] += v * t1[b, w, s_in, k2]
  DenseTensor t2({bb, 4, w2, k2});
  for (const auto& block : op.blocks) {
    for (const auto& e : block.elems) {
      const double* src =
          t1.data() + (block.vl * 4 + static_cast<std::size_t>(e.s_in)) * k2;
      double* dst =
          t2.data() + (static_cast<std::size_t>(e.s_out) * w2 + block.vr) * k2;
      for (std::size_t b = 0; b < bb; ++b) {
        kernels::axpy(k2, e.value, src + b * w * 4 * k2, dst + b * 4 * w2 * k2);
      }
    }
  }

  // out[b2, w2, k2] = sum_{b, s_out} bra[b, s_out, b2] * t2[b, s_out, w2, k2]
  const DenseTensor bra_t = bra.permute({2, 0, 1});
  DenseTensor out({b2, w2, k2});
  matmul(b2, bb * 4, w2 * k2, bra_t.data(), t2.data(), out.data());
  return out;
}

DenseTensor env_step_right(const DenseTensor& env, const DenseTensor& bra,
                           const SparseMpoSite& op, const DenseTensor& ket) {
  check_site_tensor(bra);
  check_site_tensor(ket);
  const std::size_t bb = bra.extent(0), b2 = bra.extent(2);
  const std::size_t kk = ket.extent(0), k2 = ket.extent(2);
  if (env.rank() != 3 || env.extent(0) != b2 || env.extent(1) != op.cols ||
      env.extent(2) != k2) {
    throw DimensionError("right environment extents do not match the site");
  }
  const std::size_t w = op.rows, w2 = op.cols;

  // t1[b2, w2, s, k] = sum_k2 env[b2, w2, k2] * ket[k, s, k2]
  const DenseTensor ket_t = ket.permute({2, 1, 0});
  DenseTensor t1({b2, w2, 4, kk});
  matmul(b2 * w2, k2, 4 * kk, env.data(), ket_t.data(), t1.data());

  // t2[s_out, b2, w, k] += v * t1[b2, w2, s_in, k]
  DenseTensor t2({4, b2, w, kk});
  for (const auto& block : op.blocks) {
    for (const auto& e : block.elems) {
      const double* src =
          t1.data() + (block.vr * 4 + static_cast<std::size_t>(e.s_in)) * kk;
      double* dst =
          t2.data() + (static_cast<std::size_t>(e.s_out) * b2 * w + block.vl) * kk;
      for (std::size_t b = 0; b < b2; ++b) {
        kernels::axpy(kk, e.value, src + b * w2 * 4 * kk, dst + b * w * kk);
      }
    }
  }

  // out[b, w, k] = sum_{s_out, b2} bra[b, s_out, b2] * t2[s_out, b2, w, k]
  DenseTensor out({bb, w, kk});
  matmul(bb, 4 * b2, w * kk, bra.data(), t2.data(), out.data());
  return out;
}

double expectation(const MPS& state, const NumericMPO& op) {
  const std::size_t n = state.n_sites();
  if (op.tensors.size() != n) {
    throw DimensionError("MPO and MPS chain lengths differ");
  }
  const auto sparse = sparsify(op);
  DenseTensor env = boundary_environment();
  for (std::size_t i = 0; i < n; ++i) {
    env = env_step_left(env, state.tensors[i], sparse[i], state.tensors[i]);
  }
  if (env.size() != 1) throw DimensionError("MPO boundary bond exceeds 1");
  const double nrm2 = overlap(state, state);
  if (nrm2 <= 0.0) throw NumericError("expectation of a zero-norm state");
  return env[0] / nrm2;
}

void save_mps(const MPS& state, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os.write("TCMPS001", 8);
  const std::uint64_t n = state.n_sites();
  const std::int64_t center = state.center;
  os.write(reinterpret_cast<const char*>(&n), 8);
  os.write(reinterpret_cast<const char*>(&center), 8);
  for (const auto& a : state.tensors) {
    check_site_tensor(a);
    const std::uint64_t l = a.extent(0), r = a.extent(2);
    os.write(reinterpret_cast<const char*>(&l), 8);
    os.write(reinterpret_cast<const char*>(&r), 8);
    os.write(reinterpret_cast<const char*>(a.data()),
             static_cast<std::streamsize>(a.size() * sizeof(double)));
  }
  if (!os) throw ConfigError("failed while writing: " + path);
}

MPS load_mps(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open for reading: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "TCMPS001", 8) != 0) {
    throw ConfigError("not an MPS container: " + path);
  }
  std::uint64_t n = 0;
  std::int64_t center = 0;
  is.read(reinterpret_cast<char*>(&n), 8);
  is.read(reinterpret_cast<char*>(&center), 8);
  if (!is || n == 0 || n > 4096 || center < -1 ||
      center >= static_cast<std::int64_t>(n)) {
    throw ConfigError("corrupt MPS header: " + path);
  }
  MPS state;
  state.center = static_cast<std::ptrdiff_t>(center);
  state.tensors.reserve(n);
  std::size_t prev_r = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t l = 0, r = 0;
    is.read(reinterpret_cast<char*>(&l), 8);
    is.read(reinterpret_cast<char*>(&r), 8);
    if (!is || l == 0 || r == 0 || l != prev_r || l > (1ull << 32) ||
        r > (1ull << 32) || l * r > (1ull << 32)) {
      throw ConfigError("corrupt MPS site header: " + path);
    }
    DenseTensor a({static_cast<std::size_t>(l), 4, static_cast<std::size_t>(r)});
    is.read(reinterpret_cast<char*>(a.data()),
            static_cast<std::streamsize>(a.size() * sizeof(double)));
    if (!is) throw ConfigError("truncated MPS container: " + path);
    state.tensors.push_back(std::move(a));
    prev_r = static_cast<std::size_t>(r);
  }
  if (prev_r != 1) throw ConfigError("MPS boundary bond must be 1: " + path);
  return state;
}

}  // namespace tcdmrg
