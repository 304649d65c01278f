#pragma once

#include "rissim/types.hpp"

namespace rissim {

// Strongly concave per-user power subproblem with frozen interference:
//   max  sum_k ln(1 + gain_k p_k / mui_k) + prices^T p - tau/2 ||p - p_prev||^2
//   s.t. p >= 0, sum_k p_k <= budget.
struct PowerSubproblem {
  ArrayXd gain;    // |H_qq[k]|^2, >= 0
  ArrayXd mui;     // frozen interference-plus-noise, > 0
  ArrayXd p_prev;  // proximal center
  ArrayXd prices;  // interference prices, <= 0
  double tau = 0.1;
  double budget = 1.0;
};

struct PowerSolution {
  ArrayXd p;
  double mu = 0.0;  // budget multiplier
  int bisect_iters = 0;
};

// Subproblem objective in nats.
double power_objective(const PowerSubproblem& sub, const ArrayXd& p);

// Multi-level water filling: per-component KKT quadratics in closed form,
// budget multiplier located by bisection. The returned allocation is always
// budget-feasible; |sum(p) - budget| <= bisect_tol * budget holds whenever
// the budget constraint is active.
PowerSolution solve_power(const PowerSubproblem& sub, double bisect_tol);

}  // namespace rissim
