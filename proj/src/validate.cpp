#include "rissim/validate.hpp"

#include <json.hpp>

#include "rissim/channel.hpp"
#include "rissim/dsca.hpp"
#include "rissim/errors.hpp"
#include "rissim/netbus.hpp"
#include "rissim/oracle.hpp"
#include "rissim/power_alloc.hpp"
#include "rissim/rate_model.hpp"
#include "rissim/ris_opt.hpp"
#include "rissim/rng.hpp"

namespace rissim::validate {

namespace {

ScenarioConfig small_config(int users, int subcarriers, int elements) {
  ScenarioConfig cfg = default_scenario(std::min(users, 3) < 3 ? 2 : 3);
  cfg.Q = users;
  cfg.K = subcarriers;
  cfg.M = elements;
  cfg.ris_enabled = elements > 0;
  cfg.L = std::min(cfg.L, subcarriers);
  return cfg;
}

// Random point of the feasible set: powers inside the budget simplex, phi
// inside the unit disk. Lorentzian parameters are not involved here.
NetworkState random_feasible_state(const ScenarioConfig& cfg, std::uint64_t seed) {
  SplitMix64 rng(seed);
  NetworkState state(cfg.Q);
  const int m_n = cfg.effective_m();
  for (int q = 0; q < cfg.Q; ++q) {
    state[q].power = ArrayXd(cfg.K);
    for (int k = 0; k < cfg.K; ++k) state[q].power[k] = rng.uniform01() * cfg.P_q / cfg.K;
    state[q].phi = ReflectionProfile(cfg.K, m_n);
    for (int m = 0; m < m_n; ++m)
      for (int k = 0; k < cfg.K; ++k) {
        const double r = 0.95 * std::sqrt(rng.uniform01());
        const double a = 2.0 * M_PI * rng.uniform01();
        state[q].phi(k, m) = Complex(r * std::cos(a), r * std::sin(a));
      }
    state[q].lorentz = LorentzianParams::zeros(m_n);
  }
  return state;
}

double rel_inf_error(const ArrayXd& got, const ArrayXd& want) {
  const double scale = std::max(want.abs().maxCoeff(), 1e-12);
  return (got - want).abs().maxCoeff() / scale;
}

double rel_inf_error(const MatrixXcd& got, const MatrixXcd& want) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-12);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

SuiteResult gradient_suite(const GradientSuiteOptions& opts) {
  SuiteResult result{"gradient_fd", true, 0.0, opts.rel_tol, ""};

  for (int inst = 0; inst < opts.instances; ++inst) {
    ScenarioConfig cfg = small_config(opts.users, opts.subcarriers, opts.elements);
    const std::uint64_t seed = mix_seed(opts.seed, inst);
    const ChannelSet channels = generate_channels(cfg, seed);
    const NetworkState state = random_feasible_state(cfg, mix_seed(seed, 0xabc));

    for (int q = 0; q < cfg.Q; ++q) {
      // rates of everyone else as a function of q's powers
      auto others_rate_p = [&](const ArrayXd& p) {
        NetworkState probe = state;
        probe[q].power = p;
        const LinkCoefficients coeffs(channels);
        const LinkState links = compute_links(probe, channels, coeffs, cfg.sigma_sq);
        double r = 0.0;
        for (int j = 0; j < cfg.Q; ++j)
          if (j != q) r += user_rate_nats(j, links);
        return r;
      };
      ArrayXd analytic = power_prices(q, state, channels, cfg.sigma_sq);
      if (opts.mutate_price_sign) analytic = -analytic;
      const ArrayXd fd = oracle::fd_gradient(others_rate_p, state[q].power, 1e-6);
      result.max_error = std::max(result.max_error, rel_inf_error(analytic, fd));

      auto own_rate_phi = [&](const MatrixXcd& phi) {
        NetworkState probe = state;
        probe[q].phi = phi;
        const LinkCoefficients coeffs(channels);
        return user_rate_nats(q, compute_links(probe, channels, coeffs, cfg.sigma_sq));
      };
      auto others_rate_phi = [&](const MatrixXcd& phi) {
        NetworkState probe = state;
        probe[q].phi = phi;
        const LinkCoefficients coeffs(channels);
        const LinkState links = compute_links(probe, channels, coeffs, cfg.sigma_sq);
        double r = 0.0;
        for (int j = 0; j < cfg.Q; ++j)
          if (j != q) r += user_rate_nats(j, links);
        return r;
      };
      PhiGradients grads = phi_gradients(q, state, channels, cfg.sigma_sq);
      if (opts.mutate_price_sign) grads.pi_phi = -grads.pi_phi;
      const MatrixXcd fd_gamma = oracle::fd_gradient_complex(own_rate_phi, state[q].phi, 1e-6);
      const MatrixXcd fd_pi = oracle::fd_gradient_complex(others_rate_phi, state[q].phi, 1e-6);
      result.max_error = std::max(result.max_error, rel_inf_error(grads.gamma, fd_gamma));
      result.max_error = std::max(result.max_error, rel_inf_error(grads.pi_phi, fd_pi));
    }
  }

  result.pass = result.max_error <= result.tolerance;
  result.detail = std::to_string(opts.instances) + " instances";
  return result;
}

SuiteResult waterfilling_suite(int instances, int subcarriers, std::uint64_t seed) {
  SuiteResult result{"waterfilling_pg", true, 0.0, 1e-6, ""};
  double worst_slack = 0.0;

  for (int inst = 0; inst < instances; ++inst) {
    SplitMix64 rng(mix_seed(seed, inst));
    PowerSubproblem sub;
    sub.gain = ArrayXd(subcarriers);
    sub.mui = ArrayXd(subcarriers);
    sub.p_prev = ArrayXd(subcarriers);
    sub.prices = ArrayXd(subcarriers);
    for (int k = 0; k < subcarriers; ++k) {
      sub.gain[k] = 2.0 * rng.uniform01();
      sub.mui[k] = 0.5 + 1.5 * rng.uniform01();
      sub.p_prev[k] = rng.uniform01();
      sub.prices[k] = -rng.uniform01();
    }
    sub.tau = 0.05 + 0.95 * rng.uniform01();
    sub.budget = 0.5 + 3.5 * rng.uniform01();

    const PowerSolution sol = solve_power(sub, 1e-12);
    const oracle::PgResult pg = oracle::projected_gradient_power(sub, 1e-12, 2000000);

    result.max_error =
        std::max(result.max_error, (sol.p - pg.p).abs().maxCoeff() / sub.budget);

    if ((sol.p < 0.0).any()) result.pass = false;
    if (sol.p.sum() > sub.budget * (1.0 + 1e-10)) result.pass = false;
    if (sol.mu > 1e-12)
      worst_slack = std::max(worst_slack, std::abs(sol.p.sum() - sub.budget) / sub.budget);
  }

  if (worst_slack > 1e-10) result.pass = false;
  if (result.max_error > result.tolerance) result.pass = false;
  result.detail = std::to_string(instances) + " instances, worst slack " +
                  std::to_string(worst_slack);
  return result;
}

SuiteResult pdd_grid_suite(int instances, int grid_points, std::uint64_t seed) {
  SuiteResult result{"pdd_grid", true, 0.0, 1e-3, ""};
  const PddParams knobs;  // defaults
  const LorentzBounds bounds;

  for (int inst = 0; inst < instances; ++inst) {
    SplitMix64 rng(mix_seed(seed, inst));
    RisSubproblem sub;
    const int k_n = 2;
    sub.grid = omega_grid(k_n);
    sub.bounds = bounds;
    sub.tau = 0.2 + 0.8 * rng.uniform01();
    sub.linear = MatrixXcd(k_n, 1);
    sub.phi_prev = ReflectionProfile(k_n, 1);
    for (int k = 0; k < k_n; ++k) {
      double a, b;
      rng.normal_pair(a, b);
      sub.linear(k, 0) = Complex(a, b);
      const double r = 0.9 * std::sqrt(rng.uniform01());
      const double t = 2.0 * M_PI * rng.uniform01();
      sub.phi_prev(k, 0) = Complex(r * std::cos(t), r * std::sin(t));
    }
    sub.params_init = spread_params(1, sub.grid, bounds);

    const PddResult pdd = pdd_solve(sub, knobs);
    const oracle::GridSearchResult grid = oracle::lorentzian_grid_search(sub, grid_points);

    const double gap = grid.objective - pdd.diag.objective;
    result.max_error = std::max(result.max_error, gap);

    // realizability and the modulus constraint on the returned profile
    const ReflectionProfile rebuilt = lorentzian_response(pdd.params, sub.grid);
    if ((pdd.phi - rebuilt).cwiseAbs().maxCoeff() > 0.0) result.pass = false;
    if (pdd.phi.cwiseAbs().maxCoeff() > 1.0 + 1e-6) result.pass = false;
  }

  if (result.max_error > result.tolerance) result.pass = false;
  result.detail = std::to_string(instances) + " instances, grid " +
                  std::to_string(grid_points) + "^3";
  return result;
}

SuiteResult bus_equivalence_suite(std::uint64_t seed) {
  SuiteResult result{"bus_equivalence", true, 0.0, 1e-12, ""};

  ScenarioConfig cfg = default_scenario(2);
  cfg.M = 8;
  const ChannelSet channels = generate_channels(cfg, seed);
  const LinkCoefficients coeffs(channels);

  // price aggregates at the initial iterate
  {
    const NetworkState state = init_state(cfg);
    const LinkState links = compute_links(state, channels, coeffs, cfg.sigma_sq);
    DirectPriceSource direct;
    BusPriceSource bus(cfg.Q);
    const auto direct_inputs = direct.collect(state, coeffs, links, 0);
    const auto bus_inputs = bus.collect(state, coeffs, links, 0);
    for (int q = 0; q < cfg.Q; ++q) {
      result.max_error = std::max(
          result.max_error,
          (direct_inputs[q].pi_power - bus_inputs[q].pi_power).abs().maxCoeff());
      result.max_error = std::max(
          result.max_error,
          (direct_inputs[q].pi_phi - bus_inputs[q].pi_phi).cwiseAbs().maxCoeff());
      result.max_error = std::max(
          result.max_error, (direct_inputs[q].mui - bus_inputs[q].mui).abs().maxCoeff());
    }
  }

  // a few full iterations through either pipeline
  {
    DscaDriver direct_driver(cfg, channels);
    BusPriceSource bus_source(cfg.Q);
    DscaDriver bus_driver(cfg, channels, &bus_source);
    for (int t = 0; t < 5; ++t) {
      direct_driver.iterate();
      bus_driver.iterate();
    }
    for (int q = 0; q < cfg.Q; ++q) {
      result.max_error = std::max(
          result.max_error,
          (direct_driver.state()[q].power - bus_driver.state()[q].power).abs().maxCoeff());
      result.max_error = std::max(
          result.max_error,
          (direct_driver.state()[q].phi - bus_driver.state()[q].phi).cwiseAbs().maxCoeff());
    }
  }

  result.pass = result.max_error <= result.tolerance;
  result.detail = "Q=2 preset, M=8";
  return result;
}

std::vector<SuiteResult> run_all(bool quick) {
  std::vector<SuiteResult> results;
  GradientSuiteOptions gopts;
  if (quick) gopts.instances = 5;
  results.push_back(gradient_suite(gopts));
  results.push_back(waterfilling_suite(quick ? 10 : 50));
  results.push_back(pdd_grid_suite(quick ? 3 : 10, quick ? 41 : 200));
  results.push_back(bus_equivalence_suite());
  return results;
}

std::string report_json(const std::vector<SuiteResult>& results) {
  nlohmann::ordered_json j;
  j["suites"] = nlohmann::json::array();
  bool all = true;
  for (const SuiteResult& r : results) {
    j["suites"].push_back({{"name", r.name},
                           {"pass", r.pass},
                           {"max_error", r.max_error},
                           {"tolerance", r.tolerance},
                           {"detail", r.detail}});
    all = all && r.pass;
  }
  j["pass"] = all;
  return j.dump(2) + "\n";
}

}  // namespace rissim::validate
