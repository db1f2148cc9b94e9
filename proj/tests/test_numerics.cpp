#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "tcdmrg/errors.hpp"
#include "tcdmrg/numerics.hpp"

using namespace tcdmrg;

namespace {

DenseTensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  DenseTensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
  return t;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  REQUIRE(a.shape() == b.shape());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("tensor construction and indexing") {
  DenseTensor t({2, 3, 4});
  CHECK(t.rank() == 3);
  CHECK(t.size() == 24);
  CHECK(t.extent(1) == 3);
  t.at({1, 2, 3}) = 5.0;
  CHECK(t[1 * 12 + 2 * 4 + 3] == 5.0);

  DenseTensor scalar;
  CHECK(scalar.rank() == 0);
  CHECK(scalar.size() == 1);

  CHECK_THROWS_AS(t.at({2, 0, 0}), IndexError);
  CHECK_THROWS_AS(t.at({0, 0}), DimensionError);
  CHECK_THROWS_AS(DenseTensor({2, 2}, {1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("reshape keeps data and checks element count") {
  auto t = random_tensor({3, 4}, 1);
  auto r = t.reshape({2, 6});
  CHECK(r.shape() == std::vector<std::size_t>{2, 6});
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(r[i] == t[i]);
  CHECK_THROWS_AS(t.reshape({5, 2}), DimensionError);
}

TEST_CASE("permute moves elements correctly") {
  DenseTensor t({2, 3, 4});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = double(i);
  auto p = t.permute({2, 0, 1});
  CHECK(p.shape() == std::vector<std::size_t>{4, 2, 3});
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 4; ++c)
        CHECK(p.at({c, a, b}) == t.at({a, b, c}));
  CHECK_THROWS_AS(t.permute({0, 1}), DimensionError);
  CHECK_THROWS_AS(t.permute({0, 1, 1}), DimensionError);
}

TEST_CASE("permute then inverse permute is the identity") {
  auto t = random_tensor({3, 2, 5, 4}, 7);
  auto p = t.permute({3, 1, 0, 2});
  auto back = p.permute({2, 1, 3, 0});
  CHECK(max_abs_diff(back, t) == 0.0);
}

TEST_CASE("contract reproduces naive matrix multiplication") {
  auto a = random_tensor({4, 6}, 2);
  auto b = random_tensor({6, 5}, 3);
  auto c = contract(a, b, {{1, 0}});
  REQUIRE(c.shape() == std::vector<std::size_t>{4, 5});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 6; ++k) s += a.at({i, k}) * b.at({k, j});
      CHECK(c.at({i, j}) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("contract over two axis pairs against naive loops") {
  auto a = random_tensor({3, 4, 5}, 4);
  auto b = random_tensor({4, 2, 3}, 5);
  auto c = contract(a, b, {{0, 2}, {1, 0}});
  REQUIRE(c.shape() == std::vector<std::size_t>{5, 2});
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      double s = 0.0;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
          s += a.at({i, j, x}) * b.at({j, y, i});
      CHECK(c.at({x, y}) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("contract to a scalar and with no pairs") {
  auto a = random_tensor({3, 4}, 6);
  auto full = contract(a, a, {{0, 0}, {1, 1}});
  CHECK(full.rank() == 0);
  CHECK(full[0] == doctest::Approx(a.frobenius_norm() * a.frobenius_norm()));

  auto b = random_tensor({2}, 8);
  auto outer = contract(a, b, {});
  CHECK(outer.shape() == std::vector<std::size_t>{3, 4, 2});
  CHECK(outer.at({1, 2, 1}) == doctest::Approx(a.at({1, 2}) * b[1]));
}

TEST_CASE("contract rejects malformed pairings") {
  auto a = random_tensor({3, 4}, 9);
  auto b = random_tensor({5, 3}, 10);
  CHECK_THROWS_AS(contract(a, b, {{0, 0}}), DimensionError);   // 3 vs 5
  CHECK_THROWS_AS(contract(a, b, {{2, 0}}), DimensionError);   // axis range
  CHECK_THROWS_AS(contract(a, b, {{0, 1}, {0, 0}}), DimensionError);  // repeat
}

TEST_CASE("matmul plain and transposed against contract") {
  auto a = random_tensor({5, 7}, 11);
  auto b = random_tensor({7, 4}, 12);
  DenseTensor c({5, 4});
  matmul(5, 7, 4, a.data(), b.data(), c.data());
  CHECK(max_abs_diff(c, contract(a, b, {{1, 0}})) < 1e-12);

  auto bt = b.permute({1, 0});  // 4 x 7
  DenseTensor c2({5, 4});
  matmul(5, 7, 4, a.data(), bt.data(), c2.data(), true);
  CHECK(max_abs_diff(c2, c) < 1e-12);
}

TEST_CASE("svd reconstructs the input") {
  for (auto shape : std::vector<std::vector<std::size_t>>{{6, 4}, {4, 6}, {5, 5}}) {
    auto a = random_tensor(shape, 13 + shape[0]);
    auto r = svd(a);
    const std::size_t k = r.S.size();
    REQUIRE(k == std::min(shape[0], shape[1]));

    for (std::size_t i = 0; i + 1 < k; ++i) CHECK(r.S[i] >= r.S[i + 1]);
    for (double s : r.S) CHECK(s >= 0.0);

    DenseTensor us = r.U;
    for (std::size_t i = 0; i < shape[0]; ++i)
      for (std::size_t j = 0; j < k; ++j) us.at({i, j}) *= r.S[j];
    auto rec = contract(us, r.Vt, {{1, 0}});
    CHECK(max_abs_diff(rec, a) < 1e-12);

    auto utu = contract(r.U, r.U, {{0, 0}});
    auto vvt = contract(r.Vt, r.Vt, {{1, 1}});
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const double d = i == j ? 1.0 : 0.0;
        CHECK(utu.at({i, j}) == doctest::Approx(d).epsilon(1e-12));
        CHECK(vvt.at({i, j}) == doctest::Approx(d).epsilon(1e-12));
      }
  }
}

TEST_CASE("svd_rank counts significant singular values") {
  auto u = random_tensor({6, 2}, 21);
  auto v = random_tensor({2, 5}, 22);
  auto a = contract(u, v, {{1, 0}});
  auto r = svd(a);
  CHECK(svd_rank(r) == 2);
}

TEST_CASE("svd rejects non-matrices and non-finite input") {
  CHECK_THROWS_AS(svd(random_tensor({2, 2, 2}, 1)), DimensionError);
  DenseTensor bad({2, 2});
  bad[3] = std::nan("");
  CHECK_THROWS_AS(svd(bad), NumericError);
}

TEST_CASE("eigendecomposition of small symmetric matrix") {
  DenseTensor a({2, 2}, {0.0, 1.0, 1.0, 0.0});
  auto e = eig_general_small(a);
  REQUIRE(e.size() == 2);
  CHECK(e[0].value.real() == doctest::Approx(-1.0));
  CHECK(e[1].value.real() == doctest::Approx(1.0));
  CHECK(std::abs(e[0].value.imag()) < 1e-14);
}

TEST_CASE("eigendecomposition of triangular matrix") {
  DenseTensor a({2, 2}, {1.0, 1.0, 0.0, 2.0});
  auto e = eig_general_small(a);
  CHECK(e[0].value.real() == doctest::Approx(1.0));
  CHECK(e[1].value.real() == doctest::Approx(2.0));
}

TEST_CASE("eigendecomposition with complex pair") {
  DenseTensor a({2, 2}, {0.0, -1.0, 1.0, 0.0});
  auto e = eig_general_small(a);
  REQUIRE(e.size() == 2);
  CHECK(e[0].value.imag() == doctest::Approx(-1.0));
  CHECK(e[1].value.imag() == doctest::Approx(1.0));
}

TEST_CASE("eigen residual A v = lambda v on random matrices") {
  for (std::uint64_t seed : {31ul, 32ul, 33ul}) {
    auto a = random_tensor({8, 8}, seed);
    auto pairs = eig_general_small(a);
    REQUIRE(pairs.size() == 8);
    for (const auto& p : pairs) {
      double norm = 0.0, res = 0.0;
      for (std::size_t i = 0; i < 8; ++i) {
        std::complex<double> av = 0.0;
        for (std::size_t j = 0; j < 8; ++j) av += a.at({i, j}) * p.vector[j];
        res += std::norm(av - p.value * p.vector[i]);
        norm += std::norm(p.vector[i]);
      }
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::sqrt(res) < 1e-10);
    }
  }
}

TEST_CASE("eig_general_small enforces the size cap") {
  CHECK_THROWS_AS(eig_general_small(random_tensor({65, 65}, 1)), DimensionError);
  CHECK_THROWS_AS(eig_general_small(random_tensor({3, 4}, 1)), DimensionError);
}

TEST_CASE("qr_orthonormalize produces an orthonormal spanning set") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<std::vector<double>> vecs(3, std::vector<double>(6));
  for (auto& v : vecs)
    for (double& x : v) x = dist(rng);

  auto q = qr_orthonormalize(vecs);
  REQUIRE(q.size() == 3);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) {
      double g = 0.0;
      for (std::size_t k = 0; k < 6; ++k) g += q[i][k] * q[j][k];
      CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }

  // Each input must be a combination of the output basis.
  for (const auto& v : vecs) {
    std::vector<double> resid = v;
    for (const auto& b : q) {
      double c = 0.0;
      for (std::size_t k = 0; k < 6; ++k) c += b[k] * v[k];
      for (std::size_t k = 0; k < 6; ++k) resid[k] -= c * b[k];
    }
    double rn = 0.0;
    for (double x : resid) rn += x * x;
    CHECK(std::sqrt(rn) < 1e-12);
  }
}

TEST_CASE("qr_orthonormalize drops dependent vectors") {
  std::vector<std::vector<double>> vecs = {
      {1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, {0.0, 3.0, 0.0}};
  auto q = qr_orthonormalize(vecs);
  CHECK(q.size() == 2);
}

TEST_CASE("qr and lq factorizations") {
  for (auto shape : std::vector<std::vector<std::size_t>>{{6, 4}, {4, 6}, {5, 5}}) {
    auto a = random_tensor(shape, 50 + shape[0]);
    const std::size_t r = std::min(shape[0], shape[1]);

    auto [q, rr] = qr_factor(a);
    REQUIRE(q.shape() == std::vector<std::size_t>{shape[0], r});
    REQUIRE(rr.shape() == std::vector<std::size_t>{r, shape[1]});
    CHECK(max_abs_diff(contract(q, rr, {{1, 0}}), a) < 1e-12);
    auto qtq = contract(q, q, {{0, 0}});
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        CHECK(qtq.at({i, j}) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < std::min(i, shape[1]); ++j)
        CHECK(rr.at({i, j}) == 0.0);

    auto [ll, q2] = lq_factor(a);
    REQUIRE(ll.shape() == std::vector<std::size_t>{shape[0], r});
    REQUIRE(q2.shape() == std::vector<std::size_t>{r, shape[1]});
    CHECK(max_abs_diff(contract(ll, q2, {{1, 0}}), a) < 1e-12);
    auto qqt = contract(q2, q2, {{1, 1}});
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        CHECK(qqt.at({i, j}) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    for (std::size_t i = 0; i < shape[0]; ++i)
      for (std::size_t j = i + 1; j < r; ++j)
        CHECK(ll.at({i, j}) == 0.0);
  }
}

TEST_CASE("frobenius norm") {
  DenseTensor t({2, 2}, {3.0, 0.0, 4.0, 0.0});
  CHECK(t.frobenius_norm() == doctest::Approx(5.0));
}
