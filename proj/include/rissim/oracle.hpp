#pragma once

#include <functional>

#include "rissim/power_alloc.hpp"
#include "rissim/ris_opt.hpp"
#include "rissim/types.hpp"

// Independent numerical routes used to check the analytic implementations.
// Nothing here calls gradient or solver code from the modules under test.
namespace rissim::oracle {

// Central finite differences, one coordinate at a time.
ArrayXd fd_gradient(const std::function<double(const ArrayXd&)>& f, const ArrayXd& x,
                    double step);

// Complex variant differencing real and imaginary parts separately; returns
// g with 2*Re<g, dx> equal to the first-order change of f (Wirtinger
// convention, matching the analytic gradients).
MatrixXcd fd_gradient_complex(const std::function<double(const MatrixXcd&)>& f,
                              const MatrixXcd& x, double step);

// Euclidean projection onto {p >= 0, sum(p) <= budget}.
ArrayXd project_power_feasible(const ArrayXd& p, double budget);

struct PgResult {
  ArrayXd p;
  int iters = 0;
};

// Projected gradient ascent on the power subproblem objective, run to a
// fixed-point tolerance on the projected update.
PgResult projected_gradient_power(const PowerSubproblem& sub, double tol, int max_iters);

struct GridSearchResult {
  double objective = 0.0;
  LorentzianParams params;
  ReflectionProfile phi;
  long feasible_points = 0;
};

// Exhaustive box grid over (F, omega0, kappa) for a single-element surface
// subproblem, honoring the on-grid modulus constraint.
GridSearchResult lorentzian_grid_search(const RisSubproblem& sub, int points_per_axis);

}  // namespace rissim::oracle
