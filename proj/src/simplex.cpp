#include "gnepvi/simplex.hpp"

#include "gnepvi/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace gnepvi {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr double kPhase1Tol = 1e-8;
constexpr int kMaxPivots = 20000;

struct Tableau {
  // rows: m constraints, columns: structural + slack (+ artificial), last col = rhs
  Mat t;
  std::vector<int> basis;
  int rows;
  int cols;  // excluding rhs

  double& at(int i, int j) { return t(i, j); }
  double rhs(int i) const { return t(i, cols); }
};

void pivot(Tableau& tab, Vec& cost, double& cost_rhs, int row, int col) {
  const double p = tab.t(row, col);
  tab.t.row(row) /= p;
  for (int i = 0; i < tab.rows; ++i) {
    if (i == row) continue;
    const double f = tab.t(i, col);
    if (std::abs(f) > 0.0) tab.t.row(i) -= f * tab.t.row(row);
  }
  const double cf = cost[col];
  if (std::abs(cf) > 0.0) {
    for (int j = 0; j <= tab.cols; ++j) {
      if (j < tab.cols)
        cost[j] -= cf * tab.t(row, j);
      else
        cost_rhs -= cf * tab.t(row, j);
    }
  }
  tab.basis[static_cast<std::size_t>(row)] = col;
}

// Returns true on optimal, false on unbounded. `allowed` masks entering columns.
bool run_simplex(Tableau& tab, Vec& cost, double& cost_rhs, const std::vector<bool>& allowed) {
  for (int iter = 0; iter < kMaxPivots; ++iter) {
    // Bland's rule: first allowed column with negative reduced cost.
    int enter = -1;
    for (int j = 0; j < tab.cols; ++j) {
      if (!allowed[static_cast<std::size_t>(j)]) continue;
      if (cost[j] < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tab.rows; ++i) {
      const double a = tab.t(i, enter);
      if (a > kPivotTol) {
        const double ratio = tab.rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (leave < 0 || tab.basis[static_cast<std::size_t>(i)] <
                               tab.basis[static_cast<std::size_t>(leave)]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;
    pivot(tab, cost, cost_rhs, leave, enter);
  }
  throw NumericError("simplex: pivot limit exceeded");
}

}  // namespace

LpResult solve_lp(const Vec& c, const Mat& A, const Vec& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  if (A.cols() != n || b.size() != m) throw UsageError("solve_lp: dimension mismatch");

  LpResult res;
  if (m == 0) {
    if (c.cwiseAbs().maxCoeff() > 0.0 && n > 0) {
      res.status = LpStatus::Unbounded;
      return res;
    }
    res.status = LpStatus::Optimal;
    res.x = Vec::Zero(n);
    res.value = 0.0;
    return res;
  }

  // Standard form: x = u - v, u,v >= 0; slack s >= 0; rows with negative rhs
  // are negated and given an artificial variable.
  const int nsplit = 2 * n;
  int nart = 0;
  std::vector<bool> negated(static_cast<std::size_t>(m), false);
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      negated[static_cast<std::size_t>(i)] = true;
      ++nart;
    }
  }

  Tableau tab;
  tab.rows = m;
  tab.cols = nsplit + m + nart;
  tab.t = Mat::Zero(m, tab.cols + 1);
  tab.basis.assign(static_cast<std::size_t>(m), -1);

  int art = nsplit + m;
  for (int i = 0; i < m; ++i) {
    const double sgn = negated[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tab.t(i, j) = sgn * A(i, j);
      tab.t(i, n + j) = -sgn * A(i, j);
    }
    tab.t(i, nsplit + i) = sgn;  // slack
    tab.t(i, tab.cols) = sgn * b[i];
    if (negated[static_cast<std::size_t>(i)]) {
      tab.t(i, art) = 1.0;
      tab.basis[static_cast<std::size_t>(i)] = art;
      ++art;
    } else {
      tab.basis[static_cast<std::size_t>(i)] = nsplit + i;
    }
  }

  std::vector<bool> allowed(static_cast<std::size_t>(tab.cols), true);

  if (nart > 0) {
    // Phase 1: minimize sum of artificials.
    Vec cost1 = Vec::Zero(tab.cols);
    double cost_rhs = 0.0;
    for (int j = nsplit + m; j < tab.cols; ++j) cost1[j] = 1.0;
    // Make reduced costs consistent with the starting basis.
    for (int i = 0; i < m; ++i) {
      const int bj = tab.basis[static_cast<std::size_t>(i)];
      if (cost1[bj] != 0.0) {
        const double f = cost1[bj];
        for (int j = 0; j < tab.cols; ++j) cost1[j] -= f * tab.t(i, j);
        cost_rhs -= f * tab.t(i, tab.cols);
      }
    }
    if (!run_simplex(tab, cost1, cost_rhs, allowed))
      throw NumericError("simplex: phase 1 unbounded");
    if (-cost_rhs > kPhase1Tol) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Forbid artificials from re-entering; basic artificials stay at zero.
    for (int j = nsplit + m; j < tab.cols; ++j) allowed[static_cast<std::size_t>(j)] = false;
  }

  // Phase 2: original objective over split variables.
  Vec cost2 = Vec::Zero(tab.cols);
  double cost_rhs = 0.0;
  for (int j = 0; j < n; ++j) {
    cost2[j] = c[j];
    cost2[n + j] = -c[j];
  }
  for (int i = 0; i < m; ++i) {
    const int bj = tab.basis[static_cast<std::size_t>(i)];
    if (cost2[bj] != 0.0) {
      const double f = cost2[bj];
      for (int j = 0; j < tab.cols; ++j) cost2[j] -= f * tab.t(i, j);
      cost_rhs -= f * tab.t(i, tab.cols);
    }
  }
  if (!run_simplex(tab, cost2, cost_rhs, allowed)) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  Vec split = Vec::Zero(tab.cols);
  for (int i = 0; i < m; ++i) split[tab.basis[static_cast<std::size_t>(i)]] = tab.rhs(i);
  res.x = Vec(n);
  for (int j = 0; j < n; ++j) res.x[j] = split[j] - split[n + j];
  res.value = c.dot(res.x);
  res.status = LpStatus::Optimal;
  return res;
}

bool lp_feasible(const Mat& A, const Vec& b) {
  const Vec c = Vec::Zero(A.cols());
  return solve_lp(c, A, b).status == LpStatus::Optimal;
}

}  // namespace gnepvi
