#include "rissim/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "rissim/errors.hpp"

namespace rissim::oracle {

ArrayXd fd_gradient(const std::function<double(const ArrayXd&)>& f, const ArrayXd& x,
                    double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient: step must be > 0");
  ArrayXd g(x.size());
  ArrayXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

MatrixXcd fd_gradient_complex(const std::function<double(const MatrixXcd&)>& f,
                              const MatrixXcd& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient_complex: step must be > 0");
  MatrixXcd g(x.rows(), x.cols());
  MatrixXcd probe = x;
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double h = step * std::max(1.0, std::abs(x(r, c)));
      probe(r, c) = x(r, c) + h;
      const double fpr = f(probe);
      probe(r, c) = x(r, c) - h;
      const double fmr = f(probe);
      probe(r, c) = x(r, c) + Complex(0.0, h);
      const double fpi = f(probe);
      probe(r, c) = x(r, c) - Complex(0.0, h);
      const double fmi = f(probe);
      probe(r, c) = x(r, c);
      const double d_re = (fpr - fmr) / (2.0 * h);
      const double d_im = (fpi - fmi) / (2.0 * h);
      g(r, c) = 0.5 * Complex(d_re, d_im);
    }
  return g;
}

ArrayXd project_power_feasible(const ArrayXd& p, double budget) {
  ArrayXd clipped = p.max(0.0);
  if (clipped.sum() <= budget) return clipped;

  // Projection onto the simplex {p >= 0, sum = budget}: sort-and-threshold.
  std::vector<double> sorted(p.data(), p.data() + p.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumsum += sorted[i];
    const double candidate = (cumsum - budget) / static_cast<double>(i + 1);
    if (i + 1 == sorted.size() || sorted[i + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  return (p - theta).max(0.0);
}

PgResult projected_gradient_power(const PowerSubproblem& sub, double tol, int max_iters) {
  // Gradient written straight from the objective definition.
  auto gradient = [&sub](const ArrayXd& p) -> ArrayXd {
    return sub.gain / (sub.mui + sub.gain * p) + sub.prices - sub.tau * (p - sub.p_prev);
  };
  const double lipschitz = (sub.gain / sub.mui).square().maxCoeff() + sub.tau;
  const double step = 1.0 / lipschitz;

  PgResult result;
  result.p = project_power_feasible(sub.p_prev, sub.budget);
  for (int it = 0; it < max_iters; ++it) {
    result.iters = it + 1;
    const ArrayXd next = project_power_feasible(result.p + step * gradient(result.p), sub.budget);
    const double move = (next - result.p).abs().maxCoeff();
    result.p = next;
    if (move <= tol * std::max(1.0, sub.budget)) break;
  }
  return result;
}

GridSearchResult lorentzian_grid_search(const RisSubproblem& sub, int points_per_axis) {
  if (sub.params_init.elements() != 1)
    throw DimensionError("lorentzian_grid_search: single-element subproblems only");

  const LorentzBounds& b = sub.bounds;
  const int n = points_per_axis;
  const int k_n = static_cast<int>(sub.grid.size());

  auto axis_value = [n](double lo, double hi, int i) {
    return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  };

  GridSearchResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  best.params = LorentzianParams::zeros(1);

  VectorXcd phi(k_n);
  const VectorXcd prev = sub.phi_prev.col(0);
  const VectorXcd lin = sub.linear.col(0);

  for (int fi = 0; fi < n; ++fi) {
    const double f = axis_value(b.strength_min, b.strength_max, fi);
    for (int wi = 0; wi < n; ++wi) {
      const double w0 = axis_value(b.resonance_min, b.resonance_max, wi);
      for (int ki = 0; ki < n; ++ki) {
        const double kap = axis_value(-b.damping_max, b.damping_max, ki);

        bool feasible = true;
        double objective = 0.0;
        for (int k = 0; k < k_n; ++k) {
          const double w = sub.grid[k];
          const Complex den(w0 * w0 - w * w, kap * w);
          if (den == Complex(0.0, 0.0)) {
            feasible = false;
            break;
          }
          const Complex value = f * w * w / den;
          if (std::norm(value) > 1.0 + 1e-12) {
            feasible = false;
            break;
          }
          phi[k] = value;
        }
        if (!feasible) continue;
        ++best.feasible_points;

        objective = 0.0;
        for (int k = 0; k < k_n; ++k) {
          const Complex diff = phi[k] - prev[k];
          objective += (std::conj(lin[k]) * diff).real() - 0.5 * sub.tau * std::norm(diff);
        }
        if (objective > best.objective) {
          best.objective = objective;
          best.params.strength[0] = f;
          best.params.resonance[0] = w0;
          best.params.damping[0] = kap;
          best.phi = phi;
        }
      }
    }
  }
  return best;
}

}  // namespace rissim::oracle
