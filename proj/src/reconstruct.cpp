#include "contagion/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "contagion/errors.hpp"
#include "contagion/log.hpp"

namespace contagion {

namespace {

constexpr int kRasMaxIter = 10000;

// Smallest 2^k - 1 covering n - 1, then masked rejection: unbiased and
// bit-reproducible across platforms (mt19937_64 output is standardized).
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  if (n <= 1) return 0;
  std::uint64_t mask = 1;
  while (mask < n - 1) mask = (mask << 1) | 1;
  for (;;) {
    const std::uint64_t r = rng() & mask;
    if (r < n) return static_cast<std::size_t>(r);
  }
}

// Uniform on the open interval (0, 1).
double uniform_open01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// A hollow nonnegative matrix with row sums a and column sums l exists iff
// a_i + l_i <= sum(a) for every bank i (given sum(a) = sum(l)).
void check_hollow_feasible(const Marginals& m) {
  const double total = m.assets.sum();
  for (int i = 0; i < m.size(); ++i) {
    const double need = m.assets(i) + m.liabilities(i);
    if (need > total * (1.0 + 1e-12))
      throw InfeasibleMarginals(
          "no hollow-diagonal matrix satisfies the marginals: bank " + std::to_string(i) +
          " carries a_i + l_i = " + std::to_string(need) + " of total " + std::to_string(total));
  }
}

double per_bank_residual(double target, double actual) {
  if (target > 0.0) return std::abs(actual - target) / target;
  return actual != 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

double marginal_residual(const Eigen::MatrixXd& x, const Marginals& m) {
  const Eigen::VectorXd rowsum = x.rowwise().sum();
  const Eigen::VectorXd colsum = x.colwise().sum();
  double worst = 0.0;
  for (int i = 0; i < m.size(); ++i) {
    worst = std::max(worst, per_bank_residual(m.assets(i), rowsum(i)));
    worst = std::max(worst, per_bank_residual(m.liabilities(i), colsum(i)));
  }
  return worst;
}

struct RasOutcome {
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Alternating row/column proportional scalings toward the marginals; the
// diagonal is re-zeroed after every pass. Returns non-converged if a bank
// with positive marginal has an empty row or column (support too thin).
RasOutcome ras_balance(Eigen::MatrixXd& x, const Marginals& m, double tol, int max_iter) {
  RasOutcome out;
  const int n = m.size();
  for (int iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    const Eigen::VectorXd rowsum = x.rowwise().sum();
    for (int i = 0; i < n; ++i) {
      if (m.assets(i) > 0.0) {
        if (rowsum(i) <= 0.0) return out;
        x.row(i) *= m.assets(i) / rowsum(i);
      } else {
        x.row(i).setZero();
      }
    }
    x.diagonal().setZero();
    const Eigen::VectorXd colsum = x.colwise().sum();
    for (int j = 0; j < n; ++j) {
      if (m.liabilities(j) > 0.0) {
        if (colsum(j) <= 0.0) return out;
        x.col(j) *= m.liabilities(j) / colsum(j);
      } else {
        x.col(j).setZero();
      }
    }
    x.diagonal().setZero();
    out.residual = marginal_residual(x, m);
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

// Outer product a l^T / sum(a) with a zeroed diagonal.
Eigen::MatrixXd hollow_outer_seed(const Eigen::VectorXd& a, const Eigen::VectorXd& l) {
  Eigen::MatrixXd q = a * l.transpose() / a.sum();
  q.diagonal().setZero();
  return q;
}

// Depth-first search over saturating assignments: each step picks a pair
// (i,j), i != j, and moves min(a_i, l_j), exhausting one side. Any minimal
// solution has forest support, and a forest always contains a leaf edge whose
// value saturates its row or column, so the true minimum is reachable this
// way. Candidates are tried largest-first (ties by lowest (i,j)), states that
// can no longer host a hollow completion are cut, and a node budget keeps
// large systems at essentially one greedy descent.
struct SparseSearch {
  int n;
  double dust;   // positivity / completion threshold
  double slack;  // feasibility comparison slack
  Eigen::VectorXd a;
  Eigen::VectorXd l;
  Eigen::MatrixXd x;
  Eigen::MatrixXd best_x;
  int best_links = std::numeric_limits<int>::max();
  int root_bound = 0;
  long budget = 0;

  // Every positive row and column still needs at least one more link.
  int lower_bound() const {
    int rows = 0, cols = 0;
    for (int i = 0; i < n; ++i) {
      if (a(i) > dust) ++rows;
      if (l(i) > dust) ++cols;
    }
    return std::max(rows, cols);
  }

  bool hollow_completable(double rem) const {
    for (int i = 0; i < n; ++i)
      if (a(i) + l(i) > rem + slack) return false;
    return true;
  }

  void dfs(int links) {
    const double rem = a.sum();
    if (rem <= dust && l.sum() <= dust) {
      if (links < best_links) {
        best_links = links;
        best_x = x;
        if (best_links <= root_bound) budget = 0;  // provably optimal
      }
      return;
    }
    const int bound = lower_bound();
    if (bound == 0 || links + bound >= best_links) return;

    std::vector<std::tuple<double, int, int>> cand;
    for (int i = 0; i < n; ++i) {
      if (a(i) <= dust) continue;
      for (int j = 0; j < n; ++j)
        if (j != i && l(j) > dust) cand.emplace_back(std::min(a(i), l(j)), i, j);
    }
    std::sort(cand.begin(), cand.end(), [](const auto& p, const auto& q) {
      if (std::get<0>(p) != std::get<0>(q)) return std::get<0>(p) > std::get<0>(q);
      if (std::get<1>(p) != std::get<1>(q)) return std::get<1>(p) < std::get<1>(q);
      return std::get<2>(p) < std::get<2>(q);
    });

    for (const auto& [value, i, j] : cand) {
      if (budget <= 0) return;
      if (links + bound >= best_links) return;
      --budget;
      const double ai = a(i), lj = l(j), xij = x(i, j);
      x(i, j) += value;
      if (ai <= lj) {
        l(j) = (lj == ai) ? 0.0 : lj - ai;
        a(i) = 0.0;
      } else {
        a(i) = ai - lj;
        l(j) = 0.0;
      }
      if (hollow_completable(rem - value)) dfs(links + 1);
      a(i) = ai;
      l(j) = lj;
      x(i, j) = xij;
    }
  }
};

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::anan: return "anan";
    case Method::hala: return "hala";
    case Method::maxe: return "maxe";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "anan") return Method::anan;
  if (name == "hala") return Method::hala;
  if (name == "maxe") return Method::maxe;
  return std::nullopt;
}

void Marginals::validate() const {
  if (assets.size() != liabilities.size())
    throw DimensionMismatch("asset and liability marginals differ in length");
  if (!assets.allFinite() || !liabilities.allFinite())
    throw ValidationError("marginals contain non-finite entries");
  if ((assets.array() < 0.0).any() || (liabilities.array() < 0.0).any())
    throw ValidationError("marginals must be nonnegative");
  const double sa = assets.sum();
  const double sl = liabilities.sum();
  if (std::abs(sa - sl) > 1e-9 * std::max({sa, sl, 1e-300}))
    throw ValidationError("total interbank assets (" + std::to_string(sa) +
                          ") and liabilities (" + std::to_string(sl) + ") do not balance");
}

ExposureMatrix reconstruct_maxe(const Marginals& m, double tol, int max_iter) {
  m.validate();
  if (!(tol > 0.0) || max_iter < 1) throw ValidationError("bad maxe tolerance or iteration cap");
  const int n = m.size();
  ExposureMatrix out;
  out.method = Method::maxe;
  if (m.total() <= 0.0) {
    out.x = Eigen::MatrixXd::Zero(n, n);
    return out;
  }
  check_hollow_feasible(m);

  Eigen::MatrixXd x = hollow_outer_seed(m.assets, m.liabilities);
  const RasOutcome rc = ras_balance(x, m, tol, max_iter);
  if (!rc.converged)
    throw NotConverged("maxe RAS stalled after " + std::to_string(rc.iterations) + " iterations",
                       rc.residual);
  log::debug("maxe converged in " + std::to_string(rc.iterations) + " iterations");
  out.x = std::move(x);
  return out;
}

ExposureMatrix reconstruct_hala(const Marginals& m, std::uint64_t seed, double eps) {
  m.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("hala eps must be in (0,1)");
  const int n = m.size();
  ExposureMatrix out;
  out.method = Method::hala;
  out.seed = seed;
  if (m.total() <= 0.0) {
    out.x = Eigen::MatrixXd::Zero(n, n);
    return out;
  }
  check_hollow_feasible(m);

  std::mt19937_64 rng(seed);
  Eigen::VectorXd a_rem = m.assets;
  Eigen::VectorXd l_rem = m.liabilities;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);

  std::vector<int> rows, cols;
  for (int i = 0; i < n; ++i) {
    if (a_rem(i) > 0.0) rows.push_back(i);
    if (l_rem(i) > 0.0) cols.push_back(i);
  }

  const double stop = eps * m.total();
  double total_rem = a_rem.sum();
  while (true) {
    if (total_rem <= stop) {
      total_rem = a_rem.sum();  // drop accumulated drift before deciding
      if (total_rem <= stop) break;
    }
    if (rows.empty() || cols.empty()) break;
    if (rows.size() == 1 && cols.size() == 1 && rows.front() == cols.front()) break;

    int i, j;
    do {
      i = rows[uniform_index(rng, rows.size())];
      j = cols[uniform_index(rng, cols.size())];
    } while (i == j);

    const double amount = uniform_open01(rng) * std::min(a_rem(i), l_rem(j));
    x(i, j) += amount;
    a_rem(i) -= amount;
    l_rem(j) -= amount;
    total_rem -= amount;
    if (a_rem(i) <= 0.0) {
      a_rem(i) = 0.0;
      rows.erase(std::find(rows.begin(), rows.end(), i));
    }
    if (l_rem(j) <= 0.0) {
      l_rem(j) = 0.0;
      cols.erase(std::find(cols.begin(), cols.end(), j));
    }
  }

  // Cleanup: spread the leftover marginals as a hollow outer-product seed,
  // then balance the whole matrix back onto the full marginals.
  const double rem_assets = a_rem.sum();
  const double rem_liabs = l_rem.sum();
  if (rem_assets > 0.0 && rem_liabs > 0.0) {
    Eigen::MatrixXd residual_seed = a_rem * l_rem.transpose() / rem_assets;
    residual_seed.diagonal().setZero();
    x += residual_seed;
  }
  RasOutcome rc = ras_balance(x, m, 1e-10, kRasMaxIter);
  if (!rc.converged) {
    // Thin random support can stall the balancing; widen it once.
    x += 1e-9 * hollow_outer_seed(m.assets, m.liabilities);
    rc = ras_balance(x, m, 1e-10, kRasMaxIter);
    if (!rc.converged) throw NotConverged("hala cleanup RAS stalled", rc.residual);
  }
  out.x = std::move(x);
  return out;
}

ExposureMatrix reconstruct_anan(const Marginals& m) {
  m.validate();
  const int n = m.size();
  ExposureMatrix out;
  out.method = Method::anan;
  if (m.total() <= 0.0) {
    out.x = Eigen::MatrixXd::Zero(n, n);
    return out;
  }
  check_hollow_feasible(m);

  SparseSearch search;
  search.n = n;
  search.dust = 1e-12 * std::max(m.total(), 1.0);
  search.slack = 1e-9 * std::max(m.total(), 1.0);
  search.a = m.assets;
  search.l = m.liabilities;
  search.x = Eigen::MatrixXd::Zero(n, n);
  search.root_bound = search.lower_bound();
  search.budget = n <= 12 ? 20000 : 8L * n;
  search.dfs(0);
  if (search.best_links != std::numeric_limits<int>::max()) {
    out.x = std::move(search.best_x);
    log::info("anan reconstruction placed " + std::to_string(count_links(out.x)) + " links");
    return out;
  }

  // Budget exhausted without a completion (thin feasible corner): fall back
  // to a single greedy pass and reroute any stranded diagonal residual.
  Eigen::VectorXd a_rem = m.assets;
  Eigen::VectorXd l_rem = m.liabilities;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);

  while (true) {
    double best = 0.0;
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i) {
      if (a_rem(i) <= 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i || l_rem(j) <= 0.0) continue;
        const double v = std::min(a_rem(i), l_rem(j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;

    x(bi, bj) += best;
    // exhaust the smaller side exactly
    if (a_rem(bi) <= l_rem(bj)) {
      l_rem(bj) = (l_rem(bj) == a_rem(bi)) ? 0.0 : l_rem(bj) - a_rem(bi);
      a_rem(bi) = 0.0;
    } else {
      a_rem(bi) -= l_rem(bj);
      l_rem(bj) = 0.0;
    }
  }

  const double dust = 1e-12 * std::max(m.total(), 1.0);
  if (a_rem.sum() > dust || l_rem.sum() > dust) {
    // The loop only exits with mass left when a single bank holds both
    // remaining sides; route that mass through an existing entry.
    int blocked = -1;
    a_rem.maxCoeff(&blocked);
    if (l_rem(blocked) <= dust)
      throw Infeasible("greedy reconstruction left unassignable residual marginals");

    while (std::min(a_rem(blocked), l_rem(blocked)) > dust) {
      const double need = std::min(a_rem(blocked), l_rem(blocked));
      // Rank reroute sources: reuse existing links first, then sources large
      // enough to clear the residual in one move, then sheer size; ties fall
      // to the lowest (k, j).
      int sk = -1, sj = -1;
      int best_reuse = -1, best_covers = -1;
      double best_value = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == blocked) continue;
        for (int j = 0; j < n; ++j) {
          if (j == blocked || j == k || x(k, j) <= 0.0) continue;
          const int reuse = (x(blocked, j) > 0.0 ? 1 : 0) + (x(k, blocked) > 0.0 ? 1 : 0);
          const int covers = x(k, j) >= need ? 1 : 0;
          const bool better = reuse > best_reuse ||
                              (reuse == best_reuse &&
                               (covers > best_covers ||
                                (covers == best_covers && x(k, j) > best_value)));
          if (better) {
            best_reuse = reuse;
            best_covers = covers;
            best_value = x(k, j);
            sk = k;
            sj = j;
          }
        }
      }
      if (sk < 0) {
        throw Infeasible("hollow diagonal blocks completion; residual a=" +
                         std::to_string(a_rem(blocked)) + ", l=" +
                         std::to_string(l_rem(blocked)) + " at bank " + std::to_string(blocked));
      }
      double chunk;
      if (x(sk, sj) <= need) {
        chunk = x(sk, sj);
        x(sk, sj) = 0.0;
      } else {
        chunk = need;
        x(sk, sj) -= chunk;
      }
      x(blocked, sj) += chunk;
      x(sk, blocked) += chunk;
      a_rem(blocked) = (chunk >= a_rem(blocked)) ? 0.0 : a_rem(blocked) - chunk;
      l_rem(blocked) = (chunk >= l_rem(blocked)) ? 0.0 : l_rem(blocked) - chunk;
    }
  }

  out.x = std::move(x);
  log::info("anan reconstruction placed " + std::to_string(count_links(out.x)) + " links");
  return out;
}

MarginalReport validate_marginals(const ExposureMatrix& x, const Marginals& m, double tol) {
  m.validate();
  if (x.size() != m.size())
    throw DimensionMismatch("exposure matrix size does not match marginals");

  MarginalReport report;
  report.row_residual.resize(m.size());
  report.col_residual.resize(m.size());
  const Eigen::VectorXd rowsum = x.x.rowwise().sum();
  const Eigen::VectorXd colsum = x.x.colwise().sum();
  for (int i = 0; i < m.size(); ++i) {
    report.row_residual(i) = per_bank_residual(m.assets(i), rowsum(i));
    report.col_residual(i) = per_bank_residual(m.liabilities(i), colsum(i));
    report.max_residual =
        std::max({report.max_residual, report.row_residual(i), report.col_residual(i)});
  }
  report.pass = report.max_residual <= tol;
  return report;
}

int count_links(const Eigen::MatrixXd& x, double threshold) {
  int links = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (i != j && x(i, j) > threshold) ++links;
  return links;
}

}  // namespace contagion
