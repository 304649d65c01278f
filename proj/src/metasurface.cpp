#include "rissim/metasurface.hpp"

#include <limits>

#include "rissim/errors.hpp"

namespace rissim {

ArrayXd omega_grid(int k) {
  if (k < 1) throw DimensionError("omega_grid: K must be >= 1");
  ArrayXd grid(k);
  for (int i = 0; i < k; ++i) grid[i] = M_PI * static_cast<double>(i + 1) / k;
  return grid;
}

Complex lorentzian_point(double strength, double resonance, double damping, double omega) {
  const Complex den(resonance * resonance - omega * omega, damping * omega);
  if (den == Complex(0.0, 0.0))
    throw SingularityError("lorentzian_point: response singular at omega = omega0, kappa = 0");
  return strength * omega * omega / den;
}

namespace {

inline Complex eval_unchecked(double strength, double resonance, double damping, double omega) {
  const Complex den(resonance * resonance - omega * omega, damping * omega);
  return strength * omega * omega / den;
}

}  // namespace

ReflectionProfile lorentzian_response(const LorentzianParams& params, const ArrayXd& grid) {
  const int k = static_cast<int>(grid.size());
  const int m = params.elements();
  ReflectionProfile phi(k, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i)
      phi(i, j) = lorentzian_point(params.strength[j], params.resonance[j], params.damping[j],
                                   grid[i]);
  return phi;
}

ReflectionProfile lorentzian_response_unchecked(const LorentzianParams& params,
                                                const ArrayXd& grid) {
  const int k = static_cast<int>(grid.size());
  const int m = params.elements();
  ReflectionProfile phi(k, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i)
      phi(i, j) = eval_unchecked(params.strength[j], params.resonance[j], params.damping[j],
                                 grid[i]);
  return phi;
}

MatrixXcd lorentzian_jacobian(double strength, double resonance, double damping,
                              const ArrayXd& grid) {
  const int k = static_cast<int>(grid.size());
  MatrixXcd jac(k, 3);
  for (int i = 0; i < k; ++i) {
    const double w = grid[i];
    const double w2 = w * w;
    const Complex den(resonance * resonance - w2, damping * w);
    const Complex den2 = den * den;
    jac(i, 0) = w2 / den;
    jac(i, 1) = -strength * w2 * (2.0 * resonance) / den2;
    jac(i, 2) = -strength * w2 * Complex(0.0, w) / den2;
  }
  return jac;
}

Complex project_unit_disk(Complex y) {
  const double r = std::abs(y);
  return r > 1.0 ? y / r : y;
}

ReflectionProfile project_unit_disk(const ReflectionProfile& y) {
  return y.unaryExpr([](Complex v) { return project_unit_disk(v); });
}

LorentzianParams clamp_to_bounds(LorentzianParams params, const LorentzBounds& bounds) {
  params.strength = params.strength.max(bounds.strength_min).min(bounds.strength_max);
  params.resonance = params.resonance.max(bounds.resonance_min).min(bounds.resonance_max);
  params.damping = params.damping.max(-bounds.damping_max).min(bounds.damping_max);
  return params;
}

LorentzianParams enforce_unit_modulus(LorentzianParams params, const ArrayXd& grid,
                                      const LorentzBounds& bounds) {
  auto peak_of = [&grid](double f, double w0, double k) {
    double peak = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      const double v = std::abs(eval_unchecked(f, w0, k, grid[i]));
      peak = std::isfinite(v) ? std::max(peak, v) : std::numeric_limits<double>::infinity();
    }
    return peak;
  };

  for (int m = 0; m < params.elements(); ++m) {
    double peak = peak_of(params.strength[m], params.resonance[m], params.damping[m]);
    if (peak <= 1.0) continue;
    // The response is linear in F, so scaling lands the peak exactly at 1.
    if (std::isfinite(peak) && params.strength[m] / peak >= bounds.strength_min) {
      params.strength[m] /= peak;
      continue;
    }
    // Degenerate corner: F already at its floor (or an on-bin resonance with
    // vanishing damping). Widen the resonance until the peak drops.
    params.strength[m] = bounds.strength_min;
    double kappa = params.damping[m];
    if (std::abs(kappa) < 1e-3) kappa = kappa < 0.0 ? -1e-3 : 1e-3;
    peak = peak_of(params.strength[m], params.resonance[m], kappa);
    while (peak > 1.0 && std::abs(kappa) < bounds.damping_max) {
      kappa = std::clamp(2.0 * kappa, -bounds.damping_max, bounds.damping_max);
      peak = peak_of(params.strength[m], params.resonance[m], kappa);
    }
    params.damping[m] = kappa;
  }
  return params;
}

LorentzianParams spread_params(int m, const ArrayXd& grid, const LorentzBounds& bounds) {
  LorentzianParams params = LorentzianParams::zeros(m);
  const int k = static_cast<int>(grid.size());
  for (int i = 0; i < m; ++i) {
    params.strength[i] = 0.5;
    params.resonance[i] = grid[(static_cast<long>(i) * k / std::max(m, 1)) % k];
    params.damping[i] = 1.0;
  }
  params = clamp_to_bounds(std::move(params), bounds);
  return enforce_unit_modulus(std::move(params), grid, bounds);
}

}  // namespace rissim
