#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tcdmrg/errors.hpp"
#include "tcdmrg/fermion_algebra.hpp"
#include "tcdmrg/lattice.hpp"
#include "tcdmrg/numerics.hpp"

using namespace tcdmrg;

namespace {

DenseTensor matprod(const DenseTensor& a, const DenseTensor& b) {
  return contract(a, b, {{1, 0}});
}

DenseTensor anticommutator(const DenseTensor& a, const DenseTensor& b) {
  auto ab = matprod(a, b);
  auto ba = matprod(b, a);
  DenseTensor r = ab;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += ba[i];
  return r;
}

DenseTensor single_op_matrix(const LatticePtr& lat, LadderOp op) {
  SOPOperator s;
  s.lattice = lat;
  add_term(s, 1.0, {op});
  return dense_operator_matrix(s);
}

double max_abs(const DenseTensor& t) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t[i]));
  return m;
}

double max_diff_from_identity(const DenseTensor& t) {
  const std::size_t d = t.extent(0);
  double m = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      m = std::max(m, std::abs(t.at({i, j}) - (i == j ? 1.0 : 0.0)));
  return m;
}

}  // namespace

TEST_CASE("local ladder matrices have the pinned entries") {
  const LocalOp cu = local_matrix(OpKind::create, Spin::up);
  CHECK(cu.at(1, 0) == 1.0);
  CHECK(cu.at(3, 2) == 1.0);
  CHECK(cu.parity_odd);

  const LocalOp cd = local_matrix(OpKind::create, Spin::down);
  CHECK(cd.at(2, 0) == 1.0);
  CHECK(cd.at(3, 1) == -1.0);

  const LocalOp au = local_matrix(OpKind::annihilate, Spin::up);
  const LocalOp ad = local_matrix(OpKind::annihilate, Spin::down);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(au.at(r, c) == cu.at(c, r));
      CHECK(ad.at(r, c) == cd.at(c, r));
    }

  const LocalOp nu = local_matrix(OpKind::number, Spin::up);
  CHECK(multiply(cu, au) == nu);
  CHECK(multiply(cd, ad) == local_matrix(OpKind::number, Spin::down));
  CHECK_FALSE(nu.parity_odd);
}

TEST_CASE("on-site anticommutation relations") {
  const LocalOp cu = local_matrix(OpKind::create, Spin::up);
  const LocalOp au = local_matrix(OpKind::annihilate, Spin::up);
  const LocalOp cd = local_matrix(OpKind::create, Spin::down);
  const LocalOp ad = local_matrix(OpKind::annihilate, Spin::down);

  auto anti = [](const LocalOp& a, const LocalOp& b) {
    LocalOp r = multiply(a, b);
    const LocalOp ba = multiply(b, a);
    for (std::size_t i = 0; i < 16; ++i) r.m[i] += ba.m[i];
    return r;
  };

  CHECK(anti(au, cu).m == local_identity().m);
  CHECK(anti(ad, cd).m == local_identity().m);
  for (const auto& [x, y] : std::vector<std::pair<LocalOp, LocalOp>>{
           {cu, cd}, {au, ad}, {cu, ad}, {cd, au}, {cu, cu}, {ad, ad}}) {
    const LocalOp z = anti(x, y);
    for (double v : z.m) CHECK(v == 0.0);
  }
}

TEST_CASE("on-site parity operator equals (1-2n_up)(1-2n_dn)") {
  LocalOp expected = local_identity();
  const LocalOp nu = local_matrix(OpKind::number, Spin::up);
  const LocalOp nd = local_matrix(OpKind::number, Spin::down);
  for (std::size_t i = 0; i < 4; ++i) {
    const double f = (1.0 - 2.0 * nu.at(i, i)) * (1.0 - 2.0 * nd.at(i, i));
    expected.at(i, i) = f;
  }
  CHECK(local_parity().m == expected.m);
  CHECK_FALSE(local_parity().parity_odd);
}

TEST_CASE("multiply tracks parity and is_identity prunes correctly") {
  const LocalOp cu = local_matrix(OpKind::create, Spin::up);
  const LocalOp au = local_matrix(OpKind::annihilate, Spin::up);
  CHECK_FALSE(multiply(cu, au).parity_odd);
  CHECK(multiply(multiply(cu, au), cu).parity_odd);
  CHECK(is_identity(local_identity()));
  CHECK_FALSE(is_identity(local_parity()));
  CHECK_FALSE(is_identity(cu));
}

TEST_CASE("full-chain anticommutators across sites and spins") {
  auto lat = build_lattice(1, 2, false, Ordering::row_major);
  std::vector<LadderOp> modes;
  for (std::size_t s = 0; s < 2; ++s)
    for (Spin sp : {Spin::up, Spin::down})
      modes.push_back({s, sp, false});

  for (const LadderOp& m1 : modes)
    for (const LadderOp& m2 : modes) {
      LadderOp m2dag = m2;
      m2dag.dagger = true;
      auto a = single_op_matrix(lat, m1);
      auto adag = single_op_matrix(lat, m2dag);
      auto b = single_op_matrix(lat, m2);

      const bool same = m1.site == m2.site && m1.spin == m2.spin;
      auto mixed = anticommutator(a, adag);
      if (same)
        CHECK(max_diff_from_identity(mixed) < 1e-12);
      else
        CHECK(max_abs(mixed) < 1e-12);
      CHECK(max_abs(anticommutator(a, b)) < 1e-12);
    }
}

TEST_CASE("cross-site anticommutators survive a snake ordering") {
  auto lat = build_lattice(2, 2, false, Ordering::snake);
  const LadderOp a1{1, Spin::up, false};
  const LadderOp a2{2, Spin::down, false};
  LadderOp a2dag = a2;
  a2dag.dagger = true;
  CHECK(max_abs(anticommutator(single_op_matrix(lat, a1),
                               single_op_matrix(lat, a2dag))) < 1e-12);
  CHECK(max_abs(anticommutator(single_op_matrix(lat, a1),
                               single_op_matrix(lat, a2))) < 1e-12);

  LadderOp a1dag = a1;
  a1dag.dagger = true;
  CHECK(max_diff_from_identity(anticommutator(
            single_op_matrix(lat, a1), single_op_matrix(lat, a1dag))) < 1e-12);
}

TEST_CASE("canonicalize moves a creator past a lower-site annihilator with a sign") {
  auto lat = build_lattice(1, 2, false, Ordering::row_major);
  SOPOperator op;
  op.lattice = lat;
  add_term(op, 2.5, {{0, Spin::up, false}, {1, Spin::up, true}});

  auto c = canonicalize(op);
  REQUIRE(c.terms.size() == 1);
  CHECK(c.terms[0].coeff == doctest::Approx(-2.5));
  REQUIRE(c.terms[0].ops.size() == 2);
  CHECK(c.terms[0].ops[0] == LadderOp{1, Spin::up, true});
  CHECK(c.terms[0].ops[1] == LadderOp{0, Spin::up, false});
}

TEST_CASE("canonicalize never reorders operators on the same mode") {
  auto lat = build_lattice(1, 2, false, Ordering::row_major);
  SOPOperator op;
  op.lattice = lat;
  add_term(op, 1.0, {{0, Spin::up, false}, {0, Spin::up, true}});

  auto c = canonicalize(op);
  REQUIRE(c.terms.size() == 1);
  CHECK(c.terms[0].coeff == doctest::Approx(1.0));
  CHECK(c.terms[0].ops[0].dagger == false);
  CHECK(c.terms[0].ops[1].dagger == true);
}

TEST_CASE("canonicalize merges duplicates with signs and drops cancellations") {
  auto lat = build_lattice(1, 2, false, Ordering::row_major);
  SOPOperator op;
  op.lattice = lat;
  add_term(op, 2.0, {{0, Spin::up, true}, {1, Spin::up, false}});
  add_term(op, 3.0, {{1, Spin::up, false}, {0, Spin::up, true}});
  auto c = canonicalize(op);
  REQUIRE(c.terms.size() == 1);
  CHECK(c.terms[0].coeff == doctest::Approx(-1.0));

  SOPOperator zero;
  zero.lattice = lat;
  add_term(zero, 1.0, {{0, Spin::up, true}, {1, Spin::up, false}});
  add_term(zero, 1.0, {{1, Spin::up, false}, {0, Spin::up, true}});
  CHECK(canonicalize(zero).terms.empty());

  SOPOperator tiny;
  tiny.lattice = lat;
  add_term(tiny, 1e-16, {{0, Spin::up, true}, {0, Spin::up, false}});
  CHECK(canonicalize(tiny).terms.empty());
}

TEST_CASE("canonicalize sorts by chain position, not site index") {
  auto lat = build_lattice(2, 2, false, Ordering::snake);  // chain order 0,1,3,2
  SOPOperator op;
  op.lattice = lat;
  add_term(op, 1.0, {{2, Spin::up, true}, {3, Spin::up, false}});

  auto c = canonicalize(op);
  REQUIRE(c.terms.size() == 1);
  // site 3 sits at chain position 2, site 2 at position 3
  CHECK(c.terms[0].ops[0].site == 2);
  CHECK(c.terms[0].ops[1].site == 3);
  CHECK(c.terms[0].coeff == doctest::Approx(1.0));

  SOPOperator two_creators;
  two_creators.lattice = lat;
  add_term(two_creators, 1.0, {{2, Spin::up, true}, {3, Spin::up, true}});
  auto c2 = canonicalize(two_creators);
  REQUIRE(c2.terms.size() == 1);
  CHECK(c2.terms[0].ops[0].site == 3);
  CHECK(c2.terms[0].ops[1].site == 2);
  CHECK(c2.terms[0].coeff == doctest::Approx(-1.0));
}

TEST_CASE("canonicalize preserves the dense operator on random inputs") {
  for (auto lat : {build_lattice(1, 3, false, Ordering::row_major),
                   build_lattice(2, 2, false, Ordering::snake)}) {
    std::mt19937_64 rng(99 + lat->n_sites());
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> site(0, lat->n_sites() - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::size_t> len(1, 4);

    SOPOperator op;
    op.lattice = lat;
    for (int t = 0; t < 30; ++t) {
      std::vector<LadderOp> ops;
      const std::size_t n = len(rng);
      for (std::size_t k = 0; k < n; ++k)
        ops.push_back({site(rng), coin(rng) ? Spin::up : Spin::down,
                       coin(rng) == 1});
      add_term(op, coeff(rng), std::move(ops));
    }

    auto before = dense_operator_matrix(op);
    auto after = dense_operator_matrix(canonicalize(op));
    double m = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i)
      m = std::max(m, std::abs(before[i] - after[i]));
    CHECK(m < 1e-12);
  }
}

TEST_CASE("canonical output order is deterministic") {
  auto lat = build_lattice(1, 3, false, Ordering::row_major);
  SOPOperator op;
  op.lattice = lat;
  add_term(op, 1.0, {{2, Spin::down, true}, {2, Spin::down, false}});
  add_term(op, 1.0, {{0, Spin::up, true}, {0, Spin::up, false}});
  add_term(op, 1.0, {{1, Spin::up, true}, {1, Spin::up, false}});
  auto c = canonicalize(op);
  REQUIRE(c.terms.size() == 3);
  CHECK(c.terms[0].ops[0].site == 0);
  CHECK(c.terms[1].ops[0].site == 1);
  CHECK(c.terms[2].ops[0].site == 2);
}

TEST_CASE("term_to_site_factors inserts parity strings below each operator") {
  auto lat = build_lattice(1, 3, false, Ordering::row_major);
  FermionTerm t{1.0, {{2, Spin::up, true}}};
  auto f = term_to_site_factors(t, *lat);
  REQUIRE(f.size() == 3);
  CHECK(f.at(0) == local_parity());
  CHECK(f.at(1) == local_parity());
  CHECK(f.at(2) == local_matrix(OpKind::create, Spin::up));
}

TEST_CASE("term_to_site_factors prunes identity factors") {
  auto lat = build_lattice(1, 3, false, Ordering::row_major);
  FermionTerm num{1.0, {{1, Spin::down, true}, {1, Spin::down, false}}};
  auto f = term_to_site_factors(num, *lat);
  REQUIRE(f.size() == 1);
  CHECK(f.at(1) == local_matrix(OpKind::number, Spin::down));

  FermionTerm hop{1.0, {{0, Spin::up, true}, {2, Spin::up, false}}};
  auto g = term_to_site_factors(hop, *lat);
  REQUIRE(g.size() == 3);
  CHECK(g.at(0) == multiply(local_matrix(OpKind::create, Spin::up), local_parity()));
  CHECK(g.at(1) == local_parity());
  CHECK(g.at(2) == local_matrix(OpKind::annihilate, Spin::up));
}

TEST_CASE("term factors respect the chain ordering on a snake lattice") {
  auto lat = build_lattice(2, 2, false, Ordering::snake);  // positions: 0,1,3,2
  FermionTerm t{1.0, {{2, Spin::up, true}}};               // site 2 -> position 3
  auto f = term_to_site_factors(t, *lat);
  REQUIRE(f.size() == 4);
  CHECK(f.at(3) == local_matrix(OpKind::create, Spin::up));
  CHECK(f.at(0) == local_parity());
}

TEST_CASE("dense matrix of a constant term is a multiple of the identity") {
  auto lat = build_lattice(1, 2, false, Ordering::row_major);
  SOPOperator op;
  op.lattice = lat;
  add_term(op, 3.5, {});
  auto m = dense_operator_matrix(op);
  CHECK(max_diff_from_identity(m) == doctest::Approx(2.5));
  CHECK(m.at({0, 0}) == doctest::Approx(3.5));
  CHECK(m.at({5, 5}) == doctest::Approx(3.5));
}

TEST_CASE("dense matrix of the up-number operator is diagonal 0/1") {
  auto lat = build_lattice(1, 2, false, Ordering::row_major);
  SOPOperator op;
  op.lattice = lat;
  add_term(op, 1.0, {{0, Spin::up, true}, {0, Spin::up, false}});
  auto m = dense_operator_matrix(op);
  for (std::size_t i = 0; i < 16; ++i) {
    const std::size_t d0 = i / 4;
    const double expect = (d0 == 1 || d0 == 3) ? 1.0 : 0.0;
    CHECK(m.at({i, i}) == doctest::Approx(expect));
  }
}

TEST_CASE("operators referencing out-of-range sites are rejected") {
  auto lat = build_lattice(1, 2, false, Ordering::row_major);
  SOPOperator op;
  op.lattice = lat;
  add_term(op, 1.0, {{5, Spin::up, true}});
  CHECK_THROWS_AS(canonicalize(op), IndexError);
  CHECK_THROWS_AS(dense_operator_matrix(op), IndexError);
}

TEST_CASE("sum concatenates terms on a shared lattice") {
  auto lat = build_lattice(1, 2, false, Ordering::row_major);
  SOPOperator a, b;
  a.lattice = lat;
  b.lattice = lat;
  add_term(a, 1.0, {{0, Spin::up, true}, {0, Spin::up, false}});
  add_term(b, 2.0, {{1, Spin::up, true}, {1, Spin::up, false}});
  auto s = sum(a, b);
  CHECK(s.terms.size() == 2);

  SOPOperator c;
  c.lattice = build_lattice(1, 3, false, Ordering::row_major);
  CHECK_THROWS_AS(sum(a, c), ConfigError);
}
