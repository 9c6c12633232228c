#pragma once

#include <Eigen/Dense>

namespace contagion {

/// Cross-holding fractions: c(i,j) is the fraction of bank j's total value
/// owned by bank i. Hollow diagonal, nonnegative, every column sums to
/// strictly less than one so that (I - C) is invertible with a nonnegative
/// inverse.
struct FractionMatrix {
  Eigen::MatrixXd c;

  int size() const { return static_cast<int>(c.rows()); }
  void validate() const;
};

/// Diagonal capital ratios chat(i) = 1 - l_ext(i) - sum_j C(j,i), together
/// with the external-liabilities-to-total-assets ratios they were derived
/// from.
struct CapitalRatios {
  Eigen::VectorXd chat;
  Eigen::VectorXd l_ext;

  int size() const { return static_cast<int>(chat.size()); }
  void validate() const;
};

/// External holdings d (banks x asset classes, nominal at baseline price 1)
/// and the per-class price factors p.
struct PortfolioMatrix {
  Eigen::MatrixXd d;
  Eigen::VectorXd p;

  int banks() const { return static_cast<int>(d.rows()); }
  int classes() const { return static_cast<int>(d.cols()); }
  Eigen::VectorXd external_value() const { return d * p; }
  void validate() const;
};

/// A = Chat (I - C)^{-1}. Entry (i,j) is bank i's claim on the assets bank j
/// directly holds and on j's failure costs.
struct InterdependencyMatrix {
  Eigen::MatrixXd a;

  int size() const { return static_cast<int>(a.rows()); }
};

/// Scale nominal interbank exposures into ownership fractions, column j
/// divided by bank j's total value.
FractionMatrix to_fraction_matrix(const Eigen::MatrixXd& exposures,
                                  const Eigen::VectorXd& v_total);

/// Capital ratios chat(i) = 1 - l_ext(i) - column sum i of C. Throws
/// Insolvent (listing the offending banks) if any ratio is non-positive.
CapitalRatios capital_ratios(const FractionMatrix& c, const Eigen::VectorXd& l_ext);

/// Total values V = (I - C)^{-1} D p.
Eigen::VectorXd total_values(const FractionMatrix& c, const PortfolioMatrix& port);

/// Interdependency matrix A = Chat (I - C)^{-1}.
InterdependencyMatrix interdependency(const FractionMatrix& c, const CapitalRatios& ratios);

/// One-shot equity evaluation v = A (D p - b) for a failure-cost vector b.
Eigen::VectorXd equity_values(const InterdependencyMatrix& a, const PortfolioMatrix& port,
                              const Eigen::VectorXd& failure_costs);

}  // namespace contagion
