#ifndef GNEPVI_SIMPLEX_HPP
#define GNEPVI_SIMPLEX_HPP

#include "gnepvi/types.hpp"

namespace gnepvi {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double value = 0.0;
};

/// Dense two-phase tableau simplex for
///     min c'x   s.t.  A x <= b,   x in R^n free.
/// Free variables are split internally; Bland's rule guards against cycling.
/// Sized for the small certificate LPs this project solves (tens of rows).
LpResult solve_lp(const Vec& c, const Mat& A, const Vec& b);

/// Phase-1 feasibility of { x : A x <= b }.
bool lp_feasible(const Mat& A, const Vec& b);

}  // namespace gnepvi

#endif
