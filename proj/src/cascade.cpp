#include "contagion/cascade.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "contagion/errors.hpp"
#include "contagion/log.hpp"

namespace contagion {

void ShockScenario::validate() const {
  if (!factors.allFinite()) throw ValidationError("shock factors contain non-finite entries");
  if ((factors.array() < 0.0).any()) throw ValidationError("shock factors must be nonnegative");
}

void FailureParams::validate() const {
  if (!(theta > 0.0 && theta <= 1.0))
    throw ValidationError("theta must lie in (0,1], got " + std::to_string(theta));
  if (!(beta >= 0.0 && beta <= 1.0))
    throw ValidationError("beta must lie in [0,1], got " + std::to_string(beta));
  if (v0.size() == 0 || !v0.allFinite() || (v0.array() <= 0.0).any())
    throw ValidationError("baseline equity v0 must be positive");
}

Eigen::VectorXd failure_thresholds(const Eigen::VectorXd& baseline_equity, double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw ValidationError("theta must lie in (0,1], got " + std::to_string(theta));
  if (!baseline_equity.allFinite() || (baseline_equity.array() <= 0.0).any())
    throw ValidationError("baseline equity must be positive to define failure thresholds");
  return theta * baseline_equity;
}

Eigen::VectorXd apply_shock(const PortfolioMatrix& port, const ShockScenario& shock) {
  shock.validate();
  if (shock.factors.size() != port.classes())
    throw DimensionMismatch("scenario lists " + std::to_string(shock.factors.size()) +
                            " factors for " + std::to_string(port.classes()) + " asset classes");
  return port.d * shock.factors.cwiseProduct(port.p);
}

CascadeResult run_cascade(const InterdependencyMatrix& interdep,
                          const Eigen::VectorXd& shocked_external,
                          const Eigen::VectorXd& thresholds, double beta) {
  const Eigen::Index n = interdep.a.rows();
  if (interdep.a.cols() != n) throw DimensionMismatch("interdependency matrix is not square");
  if (shocked_external.size() != n || thresholds.size() != n)
    throw DimensionMismatch("cascade inputs do not match the bank count");
  if (!shocked_external.allFinite() || !thresholds.allFinite())
    throw ValidationError("cascade inputs contain non-finite entries");
  if ((thresholds.array() < 0.0).any())
    throw ValidationError("failure thresholds must be nonnegative");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw ValidationError("beta must lie in [0,1], got " + std::to_string(beta));

  CascadeResult res;
  std::vector<char> failed(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd costs = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v;

  int t = 0;
  while (true) {
    ++t;
    assert(t <= n + 1);  // monotone set growth bounds the iteration count
    v = interdep.a * (shocked_external - costs);
    res.equity_trace.push_back(v);

    std::vector<int> fresh;
    for (Eigen::Index k = 0; k < n; ++k) {
      const bool below = v(k) - thresholds(k) < 0.0;
      if (failed[static_cast<std::size_t>(k)]) {
        assert(below);  // charged banks must stay below threshold
        continue;
      }
      if (below) fresh.push_back(static_cast<int>(k));
    }
    if (fresh.empty()) break;

    for (int k : fresh) {
      failed[static_cast<std::size_t>(k)] = 1;
      costs(k) = beta * thresholds(k);
    }
    res.hierarchy.push_back(std::move(fresh));
  }

  res.rounds = t;
  res.equity = std::move(v);
  res.failure_costs = std::move(costs);
  for (Eigen::Index k = 0; k < n; ++k)
    if (failed[static_cast<std::size_t>(k)]) res.failed.push_back(static_cast<int>(k));
  if (!res.failed.empty())
    log::debug("cascade settled after " + std::to_string(res.rounds) + " rounds with " +
               std::to_string(res.failed.size()) + " failures");
  return res;
}

CascadeResult run_cascade(const InterdependencyMatrix& interdep, const PortfolioMatrix& port,
                          const ShockScenario& shock, const FailureParams& params) {
  params.validate();
  return run_cascade(interdep, apply_shock(port, shock),
                     failure_thresholds(params.v0, params.theta), params.beta);
}

}  // namespace contagion
