#pragma once

#include <Eigen/Dense>
#include <vector>

#include "contagion/model.hpp"

namespace contagion {

// Multiplicative price factors, one per asset class of the portfolio they are
// applied to. 1.0 leaves a class untouched, 0.9 is a 10% writedown.
struct ShockScenario {
  Eigen::VectorXd factors;

  void validate() const;
};

struct FailureParams {
  double theta = 0.0;       // failure threshold as a fraction of baseline equity
  double beta = 0.0;        // deadweight cost at failure as a fraction of the threshold
  Eigen::VectorXd v0;       // baseline equity the thresholds scale from

  void validate() const;  // theta in (0,1], beta in [0,1], v0 positive
};

struct CascadeResult {
  // hierarchy[t] lists the banks that first drop below threshold in round
  // t+1, ascending. Empty when nobody fails under the shock.
  std::vector<std::vector<int>> hierarchy;
  std::vector<int> failed;                   // terminal failure set, ascending
  Eigen::VectorXd equity;                    // equity at the fixed point
  Eigen::VectorXd failure_costs;             // terminal per-bank deadweight costs
  std::vector<Eigen::VectorXd> equity_trace; // equity vector evaluated each round
  int rounds = 0;                            // iterations until the failure set stabilised
};

// v_bar = theta * baseline, elementwise. Baseline equity must be positive.
Eigen::VectorXd failure_thresholds(const Eigen::VectorXd& baseline_equity, double theta);

// External portfolio value after repricing: D (factors o p).
Eigen::VectorXd apply_shock(const PortfolioMatrix& port, const ShockScenario& shock);

// Iterates v = A (e' - b) from an empty failure set, adding every bank whose
// equity falls strictly below its threshold and charging beta * threshold on
// failure, until the set stops growing. The set expansion is monotone, so the
// terminal v is the consistent (least) fixed point and the loop ends within
// n + 1 rounds.
CascadeResult run_cascade(const InterdependencyMatrix& interdep,
                          const Eigen::VectorXd& shocked_external,
                          const Eigen::VectorXd& thresholds, double beta);

// Convenience form: reprices the portfolio and derives thresholds from the
// params' baseline equity.
CascadeResult run_cascade(const InterdependencyMatrix& interdep, const PortfolioMatrix& port,
                          const ShockScenario& shock, const FailureParams& params);

}  // namespace contagion
