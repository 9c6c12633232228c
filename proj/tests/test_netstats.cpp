#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "contagion/errors.hpp"
#include "contagion/netstats.hpp"

using namespace contagion;

namespace {

// Independent tiering score used to cross-check core_periphery_fit: core
// should form a clique, periphery an independent set, and each core bank
// should lend to and borrow from the periphery when one exists.
int tiering_score(const Eigen::MatrixXd& x, double thr, unsigned core_mask) {
  const int n = static_cast<int>(x.rows());
  const auto present = [&](int i, int j) { return x(i, j) > thr; };
  const auto in_core = [&](int i) { return (core_mask >> i) & 1u; };
  int periphery = 0;
  for (int i = 0; i < n; ++i) periphery += !in_core(i);
  int err = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (in_core(i) && in_core(j) && !present(i, j)) ++err;
      if (!in_core(i) && !in_core(j) && present(i, j)) ++err;
    }
  for (int i = 0; i < n; ++i) {
    if (!in_core(i) || periphery == 0) continue;
    bool lends = false, borrows = false;
    for (int j = 0; j < n; ++j) {
      if (in_core(j)) continue;
      lends = lends || present(i, j);
      borrows = borrows || present(j, i);
    }
    err += !lends;
    err += !borrows;
  }
  return err;
}

unsigned to_mask(const std::vector<int>& banks) {
  unsigned m = 0;
  for (int k : banks) m |= 1u << k;
  return m;
}

}  // namespace

TEST_CASE("input validation") {
  CHECK_THROWS_AS(network_statistics(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(network_statistics(Eigen::MatrixXd()), DimensionMismatch);

  Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(2, 2);
  neg(0, 1) = -1.0;
  CHECK_THROWS_AS(network_statistics(neg), ValidationError);

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(1, 1) = 0.5;
  CHECK_THROWS_AS(network_statistics(diag), NonHollow);

  Eigen::MatrixXd nan = Eigen::MatrixXd::Zero(2, 2);
  nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(network_statistics(nan), ValidationError);

  CHECK_THROWS_AS(network_statistics(Eigen::MatrixXd::Zero(2, 2), -0.5), ValidationError);
  CHECK_THROWS_AS(core_periphery_fit(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("all-zero network reports zeros without failing") {
  const NetworkStats s = network_statistics(Eigen::MatrixXd::Zero(3, 3));
  CHECK(s.links == 0);
  CHECK(s.density_pct == 0.0);
  CHECK(s.avg_degree == 0.0);
  CHECK(s.med_degree == 0.0);
  CHECK_FALSE(s.assortativity.has_value());
  CHECK(s.clustering_pct == 0.0);
  CHECK(s.lender_dependency_pct == 0.0);
  CHECK(s.hhi_assets_mean == 0.0);
  CHECK(s.core_size_pct == 0.0);

  const CorePeriphery cp = core_periphery_fit(Eigen::MatrixXd::Zero(3, 3));
  CHECK(cp.core.empty());
  CHECK(cp.error == 0);
}

TEST_CASE("directed three-cycle") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 3);
  x(0, 1) = x(1, 2) = x(2, 0) = 1.0;
  const NetworkStats s = network_statistics(x);
  CHECK(s.links == 3);
  CHECK(s.density_pct == doctest::Approx(50.0));
  CHECK(s.avg_degree == doctest::Approx(1.0));
  CHECK(s.med_degree == doctest::Approx(1.0));
  CHECK_FALSE(s.assortativity.has_value());  // undirected degrees all equal
  CHECK(s.clustering_pct == doctest::Approx(100.0));
  CHECK(s.lender_dependency_pct == doctest::Approx(100.0));
  CHECK(s.borrower_dependency_pct == doctest::Approx(100.0));
  CHECK(s.hhi_assets_mean == doctest::Approx(1.0));
  CHECK(s.hhi_liabilities_median == doctest::Approx(1.0));

  // every singleton core scores 1; the greedy picks the first bank
  const CorePeriphery cp = core_periphery_fit(x);
  CHECK(cp.core == std::vector<int>{0});
  CHECK(cp.error == 1);
  CHECK(s.core_size_pct == doctest::Approx(100.0 / 3.0));
}

TEST_CASE("bidirectional star is a perfect core-periphery fit") {
  const int n = 5;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) x(0, k) = x(k, 0) = 1.0;
  const NetworkStats s = network_statistics(x);
  CHECK(s.links == 8);
  CHECK(s.density_pct == doctest::Approx(40.0));
  CHECK(s.avg_degree == doctest::Approx(1.6));
  CHECK(s.med_degree == doctest::Approx(1.0));
  REQUIRE(s.assortativity.has_value());
  CHECK(*s.assortativity == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.clustering_pct == 0.0);

  const CorePeriphery cp = core_periphery_fit(x);
  CHECK(cp.core == std::vector<int>{0});
  CHECK(cp.error == 0);
  CHECK(s.core_size_pct == doctest::Approx(20.0));
}

TEST_CASE("complete digraph") {
  const int n = 4;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, n);
  x.diagonal().setZero();
  const NetworkStats s = network_statistics(x);
  CHECK(s.links == 12);
  CHECK(s.density_pct == doctest::Approx(100.0));
  CHECK(s.avg_degree == doctest::Approx(3.0));
  CHECK(s.med_degree == doctest::Approx(3.0));
  CHECK_FALSE(s.assortativity.has_value());
  CHECK(s.clustering_pct == doctest::Approx(100.0));
  CHECK(s.lender_dependency_pct == doctest::Approx(100.0 / 3.0));

  // Cores of size n and n-1 both fit perfectly (a lone periphery node has no
  // periphery-periphery pairs), so pin the error and accept either size.
  const CorePeriphery cp = core_periphery_fit(x);
  CHECK(cp.error == 0);
  CHECK(cp.core.size() >= n - 1);
  CHECK(s.core_size_pct >= doctest::Approx(100.0 * (n - 1) / n));
}

TEST_CASE("two cliques of different sizes are perfectly assortative") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(5, 5);
  x(0, 1) = x(1, 2) = x(2, 0) = 1.0;  // triangle
  x(3, 4) = 1.0;                      // pair
  const NetworkStats s = network_statistics(x);
  REQUIRE(s.assortativity.has_value());
  CHECK(*s.assortativity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.clustering_pct == doctest::Approx(100.0));
}

TEST_CASE("median out-degree averages the middle pair") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 4);
  x(1, 0) = 1.0;
  x(2, 0) = x(2, 1) = 1.0;
  x(3, 0) = x(3, 1) = x(3, 2) = 1.0;
  const NetworkStats s = network_statistics(x);
  CHECK(s.links == 6);
  CHECK(s.med_degree == doctest::Approx(1.5));  // out-degrees 0,1,2,3
}

TEST_CASE("dependency and concentration use raw weights") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 3);
  x(0, 1) = 3.0;
  x(0, 2) = 1.0;
  x(2, 0) = 2.0;
  x(2, 1) = 2.0;
  const NetworkStats s = network_statistics(x);
  CHECK(s.links == 4);
  CHECK(s.lender_dependency_pct == doctest::Approx(62.5));
  CHECK(s.borrower_dependency_pct == doctest::Approx(100.0 * (1.0 + 0.6 + 1.0) / 3.0));
  CHECK(s.hhi_assets_mean == doctest::Approx(0.5625));
  CHECK(s.hhi_assets_median == doctest::Approx(0.5625));
  CHECK(s.hhi_liabilities_mean == doctest::Approx((1.0 + 0.52 + 1.0) / 3.0));
  CHECK(s.hhi_liabilities_median == doctest::Approx(1.0));

  // binarization threshold prunes links but leaves the share-based measures
  const NetworkStats t = network_statistics(x, 2.0);
  CHECK(t.links == 1);
  CHECK(t.lender_dependency_pct == s.lender_dependency_pct);
  CHECK(t.hhi_liabilities_mean == s.hhi_liabilities_mean);
}

TEST_CASE("links count strictly above the threshold") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 3);
  x(0, 1) = 0.5;
  x(1, 2) = 2.0;
  x(2, 0) = 5.0;
  CHECK(network_statistics(x).links == 3);
  CHECK(network_statistics(x, 0.5).links == 2);
  CHECK(network_statistics(x, 2.0).links == 1);
  CHECK(network_statistics(x, 5.0).links == 0);
}

TEST_CASE("statistics are invariant under relabelling and exact rescaling") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 7;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && unit(rng) < 0.4) x(i, j) = 0.5 + unit(rng);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) y(perm[i], perm[j]) = x(i, j);

  const NetworkStats a = network_statistics(x);
  const NetworkStats b = network_statistics(y);
  CHECK(a.links == b.links);
  CHECK(a.density_pct == b.density_pct);
  CHECK(a.avg_degree == b.avg_degree);
  CHECK(a.med_degree == b.med_degree);
  CHECK(a.assortativity.has_value() == b.assortativity.has_value());
  if (a.assortativity)
    CHECK(*a.assortativity == doctest::Approx(*b.assortativity).epsilon(1e-12));
  CHECK(a.clustering_pct == doctest::Approx(b.clustering_pct).epsilon(1e-12));
  CHECK(a.lender_dependency_pct == doctest::Approx(b.lender_dependency_pct).epsilon(1e-12));
  CHECK(a.hhi_assets_mean == doctest::Approx(b.hhi_assets_mean).epsilon(1e-12));
  CHECK(a.hhi_liabilities_median == doctest::Approx(b.hhi_liabilities_median).epsilon(1e-12));

  // power-of-two rescaling leaves every statistic bit-identical
  const NetworkStats c = network_statistics(4.0 * x);
  CHECK(c.links == a.links);
  CHECK(c.med_degree == a.med_degree);
  CHECK(c.assortativity == a.assortativity);
  CHECK(c.clustering_pct == a.clustering_pct);
  CHECK(c.lender_dependency_pct == a.lender_dependency_pct);
  CHECK(c.hhi_assets_mean == a.hhi_assets_mean);
  CHECK(c.hhi_assets_median == a.hhi_assets_median);
  CHECK(c.hhi_liabilities_mean == a.hhi_liabilities_mean);
  CHECK(c.core_size_pct == a.core_size_pct);
}

TEST_CASE("assortativity stays within the correlation range") {
  std::mt19937_64 rng(515);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 8);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && unit(rng) < 0.35) x(i, j) = unit(rng) + 0.1;
    const NetworkStats s = network_statistics(x);
    if (s.assortativity) {
      CHECK(*s.assortativity <= 1.0 + 1e-9);
      CHECK(*s.assortativity >= -1.0 - 1e-9);
    }
  }
}

TEST_CASE("core fit matches its own score and the exhaustive optimum at small size") {
  std::mt19937_64 rng(616);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 6;
  int optimal = 0, trials = 0;
  for (double p : {0.15, 0.3, 0.5}) {
    for (int t = 0; t < 15; ++t) {
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && unit(rng) < p) x(i, j) = 0.5 + unit(rng);

      const CorePeriphery cp = core_periphery_fit(x);
      CHECK(cp.error == tiering_score(x, 0.0, to_mask(cp.core)));
      CHECK(std::is_sorted(cp.core.begin(), cp.core.end()));

      int best = std::numeric_limits<int>::max();
      for (unsigned mask = 0; mask < (1u << n); ++mask)
        best = std::min(best, tiering_score(x, 0.0, mask));
      CHECK(cp.error >= best);
      CHECK(cp.error <= best + 2);
      optimal += cp.error == best;
      ++trials;
    }
  }
  CHECK(optimal >= trials * 3 / 4);  // the local search finds most optima
}
