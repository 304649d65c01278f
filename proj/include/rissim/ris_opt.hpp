#pragma once

#include <vector>

#include "rissim/metasurface.hpp"
#include "rissim/scenario.hpp"
#include "rissim/types.hpp"

namespace rissim {

// Per-user surface subproblem:
//   max  Re<linear, phi - phi_prev> - tau/2 ||phi - phi_prev||^2
//   s.t. phi realizable by per-element Lorentzian parameters (on the grid),
//        |phi(k,m)| <= 1.
// `linear` is scaled so that Re<linear, dphi> equals the first-order change
// of the rate (nats) under the perturbation dphi, i.e. twice the Wirtinger
// gradient.
struct RisSubproblem {
  MatrixXcd linear;           // K x M
  ReflectionProfile phi_prev; // K x M
  double tau = 0.1;
  LorentzianParams params_init;
  ArrayXd grid;               // omega bins
  LorentzBounds bounds;
};

double op5_objective(const RisSubproblem& sub, const ReflectionProfile& phi);

// Penalty-loop state threaded through the inner alternation.
struct PddState {
  double rho = 1.0;
  MatrixXcd lambda;  // K x M dual variables
  ReflectionProfile d;  // current realizable reconstruction
};

// Entrywise closed-form update of the relaxed profile:
//   P( (tau*phi_prev + linear + (d - rho*lambda)/rho) / (tau + 1/rho) ).
ReflectionProfile phi_closed_form(const RisSubproblem& sub, const PddState& pdd);

struct FitOptions {
  int max_iters = 100;
  int restarts = 0;  // extra deterministic starts beyond the given init
};

struct FitResult {
  LorentzianParams params;
  ArrayXd residuals;  // per-element squared residual
  bool progressed = true;
  int iters = 0;
};

// Independent per-element nonlinear least squares ||target_col - d(theta)||^2
// over the bounded box, solved by projected Levenberg-Marquardt with the
// analytic parameter Jacobian. Never returns a residual above the one at the
// supplied initialization.
FitResult fit_lorentzian(const MatrixXcd& target, const ArrayXd& grid,
                         const LorentzianParams& init, const LorentzBounds& bounds,
                         const FitOptions& opts = {});

struct PddDiagnostics {
  double violation = 0.0;    // final ||phi_hat - d||_inf
  double objective = 0.0;    // subproblem objective of the returned profile
  int outer_iters = 0;
  int inner_total = 0;
  std::vector<double> violation_history;  // per outer iteration
  ArrayXd fit_residuals;
  bool converged = false;
};

struct PddResult {
  ReflectionProfile phi;     // exactly d(params); on-grid modulus <= 1
  LorentzianParams params;
  PddDiagnostics diag;
};

// Two-layer procedure: the inner layer alternates the closed-form profile
// update with Lorentzian fits; the outer layer updates the duals when the
// violation is small enough and shrinks rho otherwise. Returns the realizable
// candidate with the best subproblem objective seen across outer iterations
// (after a per-element ascent polish).
PddResult pdd_solve(const RisSubproblem& sub, const PddParams& knobs);

}  // namespace rissim
