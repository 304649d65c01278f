#include "rissim/power_alloc.hpp"

#include <cassert>

#include "rissim/errors.hpp"

namespace rissim {

namespace {

void check_inputs(const PowerSubproblem& sub) {
  const auto n = sub.gain.size();
  if (sub.mui.size() != n || sub.p_prev.size() != n || sub.prices.size() != n)
    throw std::invalid_argument("solve_power: inconsistent dimensions");
  if (!(sub.tau > 0.0) || !(sub.budget > 0.0))
    throw std::invalid_argument("solve_power: tau and budget must be positive");
  if (!sub.gain.isFinite().all() || !sub.mui.isFinite().all() || !sub.p_prev.isFinite().all() ||
      !sub.prices.isFinite().all())
    throw std::invalid_argument("solve_power: non-finite input");
  if ((sub.gain < 0.0).any() || !(sub.mui > 0.0).all())
    throw std::invalid_argument("solve_power: gain must be >= 0 and mui > 0");
}

// Unconstrained stationary point of one component given the shifted price
// c = prices_k - mu + tau*p_prev_k:
//   gain/(mui + gain*p) + c - tau*p = 0,
// the larger root of tau*gain*p^2 + (tau*mui - c*gain)*p - (gain + c*mui) = 0.
double component_root(double gain, double mui, double c, double tau) {
  if (gain == 0.0) return c / tau;
  const double a = tau * gain;
  const double b = tau * mui - c * gain;
  // discriminant rewritten as a sum of squares; never cancels
  const double disc = (tau * mui + c * gain) * (tau * mui + c * gain) + 4.0 * tau * gain * gain;
  const double root = std::sqrt(disc);
  if (b <= 0.0) return (-b + root) / (2.0 * a);
  const double cc = -(gain + c * mui);
  return 2.0 * cc / (-b - root);
}

ArrayXd allocate(const PowerSubproblem& sub, double mu) {
  ArrayXd p(sub.gain.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double c = sub.prices[k] - mu + sub.tau * sub.p_prev[k];
    p[k] = std::max(component_root(sub.gain[k], sub.mui[k], c, sub.tau), 0.0);
  }
  return p;
}

}  // namespace

double power_objective(const PowerSubproblem& sub, const ArrayXd& p) {
  double obj = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    obj += std::log1p(sub.gain[k] * p[k] / sub.mui[k]);
    obj += sub.prices[k] * p[k];
    const double d = p[k] - sub.p_prev[k];
    obj -= 0.5 * sub.tau * d * d;
  }
  return obj;
}

PowerSolution solve_power(const PowerSubproblem& sub, double bisect_tol) {
  check_inputs(sub);

  PowerSolution sol;
  sol.p = allocate(sub, 0.0);
  if (sol.p.sum() <= sub.budget) return sol;  // inactive budget, mu = 0

  // mu_hi forces the all-zero allocation: every component's marginal utility
  // at p = 0 falls below it.
  double lo = 0.0;
  double hi = (sub.gain / sub.mui + sub.prices + sub.tau * sub.p_prev).maxCoeff() +
              sub.tau * sub.budget;
  assert(allocate(sub, hi).sum() <= sub.budget);

  ArrayXd p_hi = allocate(sub, hi);
  const int max_iters = 200;
  for (int it = 0; it < max_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // bracket exhausted in double precision
    ArrayXd p_mid = allocate(sub, mid);
    if (p_mid.sum() > sub.budget) {
      lo = mid;
    } else {
      hi = mid;
      p_hi = std::move(p_mid);
    }
    sol.bisect_iters = it + 1;
    if (std::abs(p_hi.sum() - sub.budget) <= bisect_tol * sub.budget) break;
  }

  // The upper endpoint keeps the allocation on the feasible side.
  sol.p = std::move(p_hi);
  sol.mu = hi;
  return sol;
}

}  // namespace rissim
