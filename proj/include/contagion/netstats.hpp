#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace contagion {

// Statistics battery for one reconstructed network. Shares (dependency, HHI)
// use the raw exposure weights; degree-based measures use the graph binarized
// at the link threshold.
struct NetworkStats {
  int links = 0;
  double density_pct = 0.0;
  double avg_degree = 0.0;
  double med_degree = 0.0;
  std::optional<double> assortativity;  // empty when end-point degrees do not vary
  double clustering_pct = 0.0;
  double lender_dependency_pct = 0.0;
  double borrower_dependency_pct = 0.0;
  double hhi_assets_mean = 0.0;
  double hhi_assets_median = 0.0;
  double hhi_liabilities_mean = 0.0;
  double hhi_liabilities_median = 0.0;
  double core_size_pct = 0.0;
};

struct CorePeriphery {
  std::vector<int> core;  // ascending bank indices
  int error = 0;          // discrete deviations from the ideal tiered structure
};

// x must be square, hollow, nonnegative; entries <= link_threshold count as absent.
NetworkStats network_statistics(const Eigen::MatrixXd& x, double link_threshold = 0.0);

// Greedy descending-degree assignment plus single-flip local search on the
// tiering error score: missing core-core links + present periphery-periphery
// links + core banks without a periphery debtor or creditor.
CorePeriphery core_periphery_fit(const Eigen::MatrixXd& x, double link_threshold = 0.0);

}  // namespace contagion
