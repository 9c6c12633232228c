#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace contagion {

enum class Method { anan, hala, maxe };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

/// Aggregated interbank assets (future row sums) and liabilities (future
/// column sums). Totals must agree to 1e-9 relative.
struct Marginals {
  Eigen::VectorXd assets;
  Eigen::VectorXd liabilities;

  int size() const { return static_cast<int>(assets.size()); }
  double total() const { return assets.sum(); }
  void validate() const;
};

/// Reconstructed bilateral exposures: row = lender, column = borrower,
/// hollow diagonal.
struct ExposureMatrix {
  Eigen::MatrixXd x;
  Method method = Method::maxe;
  std::optional<std::uint64_t> seed;  // hala only

  int size() const { return static_cast<int>(x.rows()); }
};

/// Per-bank relative residuals of an exposure matrix against marginals.
struct MarginalReport {
  Eigen::VectorXd row_residual;
  Eigen::VectorXd col_residual;
  double max_residual = 0.0;
  bool pass = false;
};

/// Maximum-entropy reconstruction: RAS/iterative proportional fitting from
/// the hollow outer-product seed Q_ij = a_i * l_j (Q_ii = 0), alternating
/// row and column scalings until both marginal residuals fall below tol.
ExposureMatrix reconstruct_maxe(const Marginals& m, double tol = 1e-10, int max_iter = 10000);

/// Randomized iterative fill: repeatedly pick an ordered pair (i, j), i != j,
/// uniformly among pairs with remaining assets and liabilities, assign a
/// uniform fraction of min(a_rem_i, l_rem_j), and stop once the remaining
/// mass is below eps of the total; a proportional cleanup then restores the
/// marginals exactly (1e-10 relative). Deterministic for a fixed seed.
ExposureMatrix reconstruct_hala(const Marginals& m, std::uint64_t seed, double eps = 1e-6);

/// Sparse minimum-density-style reconstruction: greedily assign
/// min(a_rem_i, l_rem_j) to the pair maximizing it (lowest (i, j) on ties),
/// with a deterministic reroute step when the hollow diagonal strands
/// residual mass. Link count stays near the 2N-1 greedy bound.
ExposureMatrix reconstruct_anan(const Marginals& m);

MarginalReport validate_marginals(const ExposureMatrix& x, const Marginals& m, double tol);

/// Strictly positive off-diagonal entries above the threshold.
int count_links(const Eigen::MatrixXd& x, double threshold = 0.0);

}  // namespace contagion
