#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "contagion/errors.hpp"
#include "contagion/reconstruct.hpp"

using namespace contagion;

namespace {

Marginals make(std::initializer_list<double> a, std::initializer_list<double> l) {
  Marginals m;
  m.assets = Eigen::VectorXd::Map(std::vector<double>(a).data(), static_cast<Eigen::Index>(a.size()));
  m.liabilities =
      Eigen::VectorXd::Map(std::vector<double>(l).data(), static_cast<Eigen::Index>(l.size()));
  return m;
}

// Marginals read off a random hollow matrix are feasible by construction.
Marginals random_feasible(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = i == j ? 0.0 : 10.0 * unit(rng) / n;
  Marginals m;
  m.assets = x.rowwise().sum();
  m.liabilities = x.colwise().sum();
  return m;
}

// Independent proportional-fitting oracle: column scaling first, explicit
// entry loops, L1 stopping rule. Shares only the seed definition with the
// implementation under test.
Eigen::MatrixXd ipf_oracle(const Marginals& m, double tol, int max_iter) {
  const int n = m.size();
  Eigen::MatrixXd q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q(i, j) = i == j ? 0.0 : m.assets(i) * m.liabilities(j);
  for (int it = 0; it < max_iter; ++it) {
    for (int j = 0; j < n; ++j) {
      double colsum = 0.0;
      for (int i = 0; i < n; ++i) colsum += q(i, j);
      if (colsum > 0.0)
        for (int i = 0; i < n; ++i) q(i, j) *= m.liabilities(j) / colsum;
    }
    for (int i = 0; i < n; ++i) q(i, i) = 0.0;
    for (int i = 0; i < n; ++i) {
      double rowsum = 0.0;
      for (int j = 0; j < n; ++j) rowsum += q(i, j);
      if (rowsum > 0.0)
        for (int j = 0; j < n; ++j) q(i, j) *= m.assets(i) / rowsum;
    }
    for (int i = 0; i < n; ++i) q(i, i) = 0.0;

    double l1 = 0.0;
    for (int j = 0; j < n; ++j) {
      double colsum = 0.0;
      for (int i = 0; i < n; ++i) colsum += q(i, j);
      l1 += std::abs(colsum - m.liabilities(j));
    }
    for (int i = 0; i < n; ++i) {
      double rowsum = 0.0;
      for (int j = 0; j < n; ++j) rowsum += q(i, j);
      l1 += std::abs(rowsum - m.assets(i));
    }
    if (l1 <= tol * (m.total() + 1.0)) break;
  }
  return q;
}

// Transportation feasibility on a fixed support via Gale's demand condition:
// every source subset must see enough demand among its neighbours.
bool support_feasible(int n, unsigned mask, const std::vector<int>& a, const std::vector<int>& l) {
  std::vector<unsigned> adj(static_cast<std::size_t>(n), 0);
  int bit = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (mask & (1u << bit)) adj[static_cast<std::size_t>(i)] |= 1u << j;
      ++bit;
    }
  for (unsigned r = 1; r < (1u << n); ++r) {
    int need = 0;
    unsigned seen = 0;
    for (int i = 0; i < n; ++i)
      if (r & (1u << i)) {
        need += a[static_cast<std::size_t>(i)];
        seen |= adj[static_cast<std::size_t>(i)];
      }
    int have = 0;
    for (int j = 0; j < n; ++j)
      if (seen & (1u << j)) have += l[static_cast<std::size_t>(j)];
    if (need > have) return false;
  }
  return true;
}

int exhaustive_min_links(int n, const std::vector<int>& a, const std::vector<int>& l) {
  const int slots = n * (n - 1);
  int best = slots + 1;
  for (unsigned mask = 0; mask < (1u << slots); ++mask) {
    const int bits = __builtin_popcount(mask);
    if (bits >= best) continue;
    if (support_feasible(n, mask, a, l)) best = bits;
  }
  return best;
}

}  // namespace

TEST_CASE("marginals validation") {
  CHECK_THROWS_AS(make({1, 2}, {1, 2, 3}).validate(), DimensionMismatch);
  CHECK_THROWS_AS(make({-1, 2}, {1, 0}).validate(), ValidationError);
  CHECK_THROWS_AS(make({1, 2}, {1, 1}).validate(), ValidationError);  // totals differ
  CHECK_NOTHROW(make({1, 2}, {2, 1}).validate());
}

TEST_CASE("maxe on forced supports") {
  const ExposureMatrix two = reconstruct_maxe(make({1, 1}, {1, 1}));
  CHECK(two.x(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(two.x(1, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(two.x(0, 0) == 0.0);
  CHECK(two.x(1, 1) == 0.0);

  const ExposureMatrix three = reconstruct_maxe(make({1, 1, 1}, {1, 1, 1}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(three.x(i, j) == 0.0);
      else
        CHECK(three.x(i, j) == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("maxe agrees with the independent fitting oracle") {
  const Marginals fixed = make({3, 2, 1}, {2, 2, 2});
  const ExposureMatrix got = reconstruct_maxe(fixed);
  const Eigen::MatrixXd want = ipf_oracle(fixed, 1e-12, 20000);
  CHECK((got.x - want).cwiseAbs().maxCoeff() < 1e-8);

  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> size(3, 20);
  for (int trial = 0; trial < 60; ++trial) {
    const Marginals m = random_feasible(rng, size(rng));
    const ExposureMatrix x = reconstruct_maxe(m);
    const Eigen::MatrixXd oracle = ipf_oracle(m, 1e-12, 20000);
    CHECK((x.x - oracle).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(validate_marginals(x, m, 1e-8).pass);
  }
}

TEST_CASE("maxe output is dense on the feasible support") {
  std::mt19937_64 rng(5);
  const Marginals m = random_feasible(rng, 8);
  const ExposureMatrix x = reconstruct_maxe(m);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      if (i == j) {
        CHECK(x.x(i, j) == 0.0);
      } else if (m.assets(i) > 0.0 && m.liabilities(j) > 0.0) {
        CHECK(x.x(i, j) > 0.0);
      }
    }
}

TEST_CASE("maxe rejects marginals no hollow matrix can meet") {
  // bank 0 wants to lend 5 and borrow 2 out of a total of 6
  CHECK_THROWS_AS(reconstruct_maxe(make({5, 0, 1}, {2, 2, 2})), InfeasibleMarginals);
  CHECK_THROWS_AS(reconstruct_maxe(make({6, 0}, {1, 5})), InfeasibleMarginals);
}

TEST_CASE("hala is deterministic per seed and satisfies the marginals") {
  const Marginals m = make({3, 2, 1}, {2, 2, 2});
  const ExposureMatrix a = reconstruct_hala(m, 42);
  const ExposureMatrix b = reconstruct_hala(m, 42);
  CHECK(a.x == b.x);
  CHECK(a.seed.has_value());
  CHECK(*a.seed == 42);

  const ExposureMatrix c = reconstruct_hala(m, 43);
  CHECK(a.x != c.x);

  CHECK(validate_marginals(a, m, 1e-8).pass);
  CHECK((a.x.diagonal().array() == 0.0).all());
  CHECK((a.x.array() >= 0.0).all());

  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    const Marginals r = random_feasible(rng, 3 + static_cast<int>(rng() % 18));
    const ExposureMatrix x = reconstruct_hala(r, rng());
    CHECK(validate_marginals(x, r, 1e-8).pass);
    CHECK((x.x.diagonal().array() == 0.0).all());
    CHECK((x.x.array() >= 0.0).all());
  }
}

TEST_CASE("hala on the only feasible support ignores the seed") {
  for (std::uint64_t seed : {1ull, 7ull, 99ull}) {
    const ExposureMatrix x = reconstruct_hala(make({1, 1}, {1, 1}), seed);
    CHECK(x.x(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(x.x(1, 0) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("anan reproduces the worked three-bank assignment") {
  const ExposureMatrix x = reconstruct_anan(make({3, 2, 0}, {0, 2, 3}));
  CHECK(count_links(x.x) == 3);
  CHECK(x.x(0, 1) == doctest::Approx(2.0));
  CHECK(x.x(0, 2) == doctest::Approx(1.0));
  CHECK(x.x(1, 2) == doctest::Approx(2.0));
  CHECK(x.x.sum() == doctest::Approx(5.0));
}

TEST_CASE("anan forced assignments") {
  const ExposureMatrix one = reconstruct_anan(make({5, 0}, {0, 5}));
  CHECK(count_links(one.x) == 1);
  CHECK(one.x(0, 1) == doctest::Approx(5.0));

  const ExposureMatrix two = reconstruct_anan(make({1, 1}, {1, 1}));
  CHECK(count_links(two.x) == 2);
  CHECK(two.x(0, 1) == doctest::Approx(1.0));
  CHECK(two.x(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("anan satisfies marginals sparsely on random feasible instances") {
  std::mt19937_64 rng(909);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 18);
    const Marginals m = random_feasible(rng, n);
    const ExposureMatrix x = reconstruct_anan(m);
    CHECK(validate_marginals(x, m, 1e-8).pass);
    CHECK((x.x.diagonal().array() == 0.0).all());
    CHECK((x.x.array() >= 0.0).all());
    CHECK(count_links(x.x) <= 2 * n - 1);
  }
}

TEST_CASE("anan stays within one link of the exhaustive minimum at toy scale") {
  // all integer marginal pairs with n = 3, entries <= 3
  for (int a0 = 0; a0 <= 3; ++a0)
    for (int a1 = 0; a1 <= 3; ++a1)
      for (int a2 = 0; a2 <= 3; ++a2)
        for (int l0 = 0; l0 <= 3; ++l0)
          for (int l1 = 0; l1 <= 3; ++l1)
            for (int l2 = 0; l2 <= 3; ++l2) {
              const int total = a0 + a1 + a2;
              if (total != l0 + l1 + l2 || total == 0) continue;
              const std::vector<int> a = {a0, a1, a2};
              const std::vector<int> l = {l0, l1, l2};
              bool feasible = true;
              for (int i = 0; i < 3; ++i)
                if (a[static_cast<std::size_t>(i)] + l[static_cast<std::size_t>(i)] > total)
                  feasible = false;
              Marginals m;
              m.assets = Eigen::Vector3d(a0, a1, a2);
              m.liabilities = Eigen::Vector3d(l0, l1, l2);
              if (!feasible) {
                CHECK_THROWS_AS(reconstruct_anan(m), InfeasibleMarginals);
                continue;
              }
              const ExposureMatrix x = reconstruct_anan(m);
              REQUIRE(validate_marginals(x, m, 1e-9).pass);
              const int best = exhaustive_min_links(3, a, l);
              CHECK(count_links(x.x) <= best + 1);
            }
}

TEST_CASE("zero marginals short-circuit to the empty network") {
  const Marginals m = make({0, 0, 0}, {0, 0, 0});
  CHECK(reconstruct_maxe(m).x.isZero(0.0));
  CHECK(reconstruct_hala(m, 1).x.isZero(0.0));
  CHECK(reconstruct_anan(m).x.isZero(0.0));
}

TEST_CASE("banks with zero marginals keep zero rows and columns") {
  const Marginals m = make({2, 0, 1}, {1, 0, 2});
  for (const ExposureMatrix& x :
       {reconstruct_maxe(m), reconstruct_hala(m, 9), reconstruct_anan(m)}) {
    CHECK(x.x.row(1).isZero(0.0));
    CHECK(x.x.col(1).isZero(0.0));
    CHECK(validate_marginals(x, m, 1e-8).pass);
  }
}

TEST_CASE("reconstruction scales exactly with the marginals") {
  const Marginals m = make({3, 2, 1, 2}, {2, 2, 2, 2});
  Marginals scaled;
  scaled.assets = 4.0 * m.assets;
  scaled.liabilities = 4.0 * m.liabilities;

  // power-of-two factors commute with every rounding step
  CHECK(reconstruct_maxe(scaled).x == 4.0 * reconstruct_maxe(m).x);
  CHECK(reconstruct_hala(scaled, 42).x == 4.0 * reconstruct_hala(m, 42).x);
  CHECK(reconstruct_anan(scaled).x == 4.0 * reconstruct_anan(m).x);
}

TEST_CASE("marginal reports expose per-bank residuals") {
  const Marginals m = make({3, 2, 1}, {2, 2, 2});
  ExposureMatrix x = reconstruct_maxe(m);
  MarginalReport exact = validate_marginals(x, m, 1e-8);
  CHECK(exact.pass);
  CHECK(exact.max_residual < 1e-8);

  x.x(0, 1) += 0.3;  // push row 0 and column 1 off target
  const MarginalReport off = validate_marginals(x, m, 1e-8);
  CHECK_FALSE(off.pass);
  CHECK(off.row_residual(0) == doctest::Approx(0.3 / 3.0).epsilon(1e-6));
  CHECK(off.col_residual(1) == doctest::Approx(0.3 / 2.0).epsilon(1e-6));
}

TEST_CASE("count_links honours the threshold") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 3);
  x(0, 1) = 0.5;
  x(1, 2) = 2.0;
  x(2, 0) = 5.0;
  CHECK(count_links(x) == 3);
  CHECK(count_links(x, 1.0) == 2);
  CHECK(count_links(x, 5.0) == 0);
}
