#pragma once

#include "rissim/scenario.hpp"
#include "rissim/types.hpp"

namespace rissim {

// Per-element resonator parameters of one surface (oscillator strength F,
// resonance frequency omega0, damping kappa; frequencies in rad/sample).
struct LorentzianParams {
  ArrayXd strength;
  ArrayXd resonance;
  ArrayXd damping;

  int elements() const { return static_cast<int>(strength.size()); }
  static LorentzianParams zeros(int m) {
    return {ArrayXd::Zero(m), ArrayXd::Zero(m), ArrayXd::Zero(m)};
  }
};

// Subcarrier frequency bins: omega_k = pi*k/K for k = 1..K.
ArrayXd omega_grid(int k);

// F*w^2 / (w0^2 - w^2 + j*kappa*w). Throws SingularityError when the
// denominator vanishes exactly.
Complex lorentzian_point(double strength, double resonance, double damping, double omega);

// Response of all elements over the bin grid; (k, m) layout.
ReflectionProfile lorentzian_response(const LorentzianParams& params, const ArrayXd& grid);

// Same evaluation without the singularity check; non-finite entries pass
// through (fitting loops reject them as failed steps).
ReflectionProfile lorentzian_response_unchecked(const LorentzianParams& params,
                                                const ArrayXd& grid);

// d(response)/d(F, omega0, kappa) for one element: K x 3.
MatrixXcd lorentzian_jacobian(double strength, double resonance, double damping,
                              const ArrayXd& grid);

// Identity inside the closed unit disk, radial projection outside.
Complex project_unit_disk(Complex y);
ReflectionProfile project_unit_disk(const ReflectionProfile& y);

LorentzianParams clamp_to_bounds(LorentzianParams params, const LorentzBounds& bounds);

// Scales F down per element until the on-grid modulus is <= 1 (the response
// is linear in F, so the peak lands exactly at 1).
LorentzianParams enforce_unit_modulus(LorentzianParams params, const ArrayXd& grid,
                                      const LorentzBounds& bounds);

// Initialization: resonances spread uniformly over the bin grid, F = 0.5,
// kappa = 1, then clamped to unit on-grid modulus.
LorentzianParams spread_params(int m, const ArrayXd& grid, const LorentzBounds& bounds);

}  // namespace rissim
