#include "contagion/model.hpp"

#include <cmath>
#include <string>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

// Linear solves against (I - C) refuse results whose relative residual
// exceeds this; well-conditioned calibrations land around 1e-15.
constexpr double kResidualRefusal = 1e-6;

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + " contains non-finite entries");
}

void require_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols())
    throw DimensionMismatch(std::string(what) + " must be square, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

Eigen::PartialPivLU<Eigen::MatrixXd> factor_i_minus_c(const Eigen::MatrixXd& c) {
  const auto n = c.rows();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - c;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(system);
}

// Rounding can leave -1e-18-ish dust where the exact result is nonnegative.
void clamp_dust(Eigen::MatrixXd& m, double scale) {
  const double floor = -1e-9 * std::max(scale, 1.0);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double& v = m(i, j);
      if (v < 0.0) {
        if (v < floor)
          throw NumericError("nonnegativity violated beyond rounding tolerance at (" +
                             std::to_string(i) + "," + std::to_string(j) + "): " +
                             std::to_string(v));
        v = 0.0;
      }
    }
  }
}

}  // namespace

void FractionMatrix::validate() const {
  require_square(c, "fraction matrix");
  require_finite(c, "fraction matrix");
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    if (c(i, i) != 0.0)
      throw NonHollow("fraction matrix diagonal entry " + std::to_string(i) + " is " +
                      std::to_string(c(i, i)));
  }
  if ((c.array() < 0.0).any()) throw ValidationError("fraction matrix has negative entries");
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const double colsum = c.col(j).sum();
    if (colsum >= 1.0)
      throw ColumnOverflow("column " + std::to_string(j) + " of the fraction matrix sums to " +
                           std::to_string(colsum) + " (must be < 1)");
  }
}

void CapitalRatios::validate() const {
  if (chat.size() != l_ext.size())
    throw DimensionMismatch("capital ratios and liability ratios differ in length");
  for (Eigen::Index i = 0; i < chat.size(); ++i) {
    if (!(chat(i) > 0.0 && chat(i) <= 1.0))
      throw Insolvent("capital ratio of bank " + std::to_string(i) + " is " +
                      std::to_string(chat(i)));
    if (!(l_ext(i) >= 0.0 && l_ext(i) < 1.0))
      throw ValidationError("external liability ratio of bank " + std::to_string(i) + " is " +
                            std::to_string(l_ext(i)));
  }
}

void PortfolioMatrix::validate() const {
  require_finite(d, "portfolio matrix");
  if (d.cols() != p.size())
    throw DimensionMismatch("portfolio has " + std::to_string(d.cols()) +
                            " asset classes but price vector has " + std::to_string(p.size()));
  if ((d.array() < 0.0).any()) throw ValidationError("portfolio holdings must be nonnegative");
  if ((p.array() < 0.0).any()) throw ValidationError("prices must be nonnegative");
}

FractionMatrix to_fraction_matrix(const Eigen::MatrixXd& exposures,
                                  const Eigen::VectorXd& v_total) {
  require_square(exposures, "exposure matrix");
  require_finite(exposures, "exposure matrix");
  if (exposures.rows() != v_total.size())
    throw DimensionMismatch("exposure matrix is " + std::to_string(exposures.rows()) +
                            " banks but total values has " + std::to_string(v_total.size()));
  if ((exposures.array() < 0.0).any())
    throw ValidationError("exposure matrix has negative entries");
  for (Eigen::Index i = 0; i < exposures.rows(); ++i) {
    if (exposures(i, i) != 0.0)
      throw NonHollow("exposure matrix diagonal entry " + std::to_string(i) + " is nonzero");
  }

  const auto n = exposures.rows();
  FractionMatrix out;
  out.c.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(v_total(j) > 0.0))
      throw ValidationError("total value of bank " + std::to_string(j) + " must be positive");
    const double colsum = exposures.col(j).sum();
    if (colsum >= v_total(j))
      throw ColumnOverflow("interbank liabilities of bank " + std::to_string(j) + " (" +
                           std::to_string(colsum) + ") reach its total value (" +
                           std::to_string(v_total(j)) + ")");
    out.c.col(j) = exposures.col(j) / v_total(j);
  }
  out.validate();
  return out;
}

CapitalRatios capital_ratios(const FractionMatrix& c, const Eigen::VectorXd& l_ext) {
  c.validate();
  if (l_ext.size() != c.size())
    throw DimensionMismatch("liability ratio vector length does not match bank count");

  CapitalRatios out;
  out.chat.resize(c.size());
  out.l_ext = l_ext;
  std::string offenders;
  for (int i = 0; i < c.size(); ++i) {
    if (!(l_ext(i) >= 0.0 && l_ext(i) < 1.0))
      throw ValidationError("external liability ratio of bank " + std::to_string(i) + " is " +
                            std::to_string(l_ext(i)) + ", must be in [0,1)");
    out.chat(i) = 1.0 - l_ext(i) - c.c.col(i).sum();
    if (out.chat(i) <= 0.0) offenders += (offenders.empty() ? "" : ", ") + std::to_string(i);
  }
  if (!offenders.empty())
    throw Insolvent("non-positive capital ratio for bank(s) " + offenders);
  return out;
}

Eigen::VectorXd total_values(const FractionMatrix& c, const PortfolioMatrix& port) {
  c.validate();
  port.validate();
  if (port.banks() != c.size())
    throw DimensionMismatch("portfolio bank count does not match fraction matrix");

  const Eigen::VectorXd rhs = port.external_value();
  auto lu = factor_i_minus_c(c.c);
  Eigen::VectorXd v = lu.solve(rhs);

  const auto n = c.size();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - c.c;
  const double scale = rhs.lpNorm<Eigen::Infinity>();
  const double residual = (system * v - rhs).lpNorm<Eigen::Infinity>();
  if (residual > kResidualRefusal * std::max(scale, 1e-300))
    throw SingularSystem("(I - C) solve residual " + std::to_string(residual) +
                         " exceeds refusal threshold");

  Eigen::MatrixXd vm = v;
  clamp_dust(vm, scale);
  return vm;
}

InterdependencyMatrix interdependency(const FractionMatrix& c, const CapitalRatios& ratios) {
  c.validate();
  ratios.validate();
  if (ratios.size() != c.size())
    throw DimensionMismatch("capital ratios length does not match fraction matrix");

  const auto n = c.size();
  auto lu = factor_i_minus_c(c.c);
  Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(n, n));

  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - c.c;
  const double residual =
      (system * inv - Eigen::MatrixXd::Identity(n, n)).lpNorm<Eigen::Infinity>();
  if (residual > kResidualRefusal)
    throw SingularSystem("(I - C) inversion residual " + std::to_string(residual) +
                         " exceeds refusal threshold");

  clamp_dust(inv, inv.lpNorm<Eigen::Infinity>());
  InterdependencyMatrix out;
  out.a = ratios.chat.asDiagonal() * inv;
  return out;
}

Eigen::VectorXd equity_values(const InterdependencyMatrix& a, const PortfolioMatrix& port,
                              const Eigen::VectorXd& failure_costs) {
  port.validate();
  if (a.a.rows() != a.a.cols()) throw DimensionMismatch("interdependency matrix must be square");
  if (port.banks() != a.size())
    throw DimensionMismatch("portfolio bank count does not match interdependency matrix");
  if (failure_costs.size() != a.size())
    throw DimensionMismatch("failure cost vector length does not match bank count");
  if ((failure_costs.array() < 0.0).any())
    throw ValidationError("failure costs must be nonnegative");

  return a.a * (port.external_value() - failure_costs);
}

}  // namespace contagion
