#include "rissim/dsca.hpp"

#include <cstdio>

#include "rissim/errors.hpp"
#include "rissim/power_alloc.hpp"
#include "rissim/ris_opt.hpp"

namespace rissim {

std::vector<PriceInputs> DirectPriceSource::collect(const NetworkState& state,
                                                    const LinkCoefficients& coeffs,
                                                    const LinkState& links, int /*t*/) {
  const int q_n = links.users;
  std::vector<PriceInputs> inputs(q_n);
  for (int q = 0; q < q_n; ++q) {
    PriceInputs& in = inputs[q];
    in.mui = links.mui.row(q).transpose();
    in.pi_power = ArrayXd::Zero(state[q].power.size());
    in.pi_phi = MatrixXcd::Zero(state[q].phi.rows(), state[q].phi.cols());
    for (int j = 0; j < q_n; ++j) {
      if (j == q) continue;
      const PriceContribution c = price_contribution(q, j, state, coeffs, links);
      in.pi_power += c.power;
      in.pi_phi += c.phi;
    }
  }
  return inputs;
}

NetworkState init_state(const ScenarioConfig& cfg) {
  const int m_n = cfg.effective_m();
  const ArrayXd grid = omega_grid(cfg.K);
  NetworkState state(cfg.Q);
  for (int q = 0; q < cfg.Q; ++q) {
    state[q].power = ArrayXd::Constant(cfg.K, cfg.P_q / cfg.K);
    state[q].lorentz = spread_params(m_n, grid, cfg.algo.lorentz);
    state[q].phi = m_n > 0 ? lorentzian_response(state[q].lorentz, grid)
                           : ReflectionProfile(cfg.K, 0);
  }
  return state;
}

bool is_feasible(const NetworkState& state, const ScenarioConfig& cfg, double tol) {
  for (const UserState& u : state) {
    if ((u.power < -tol).any()) return false;
    if (u.power.sum() > cfg.P_q * (1.0 + tol) + tol) return false;
    if (u.phi.size() > 0 && u.phi.cwiseAbs().maxCoeff() > 1.0 + 1e-6) return false;
  }
  return true;
}

UserState best_response(int q, const NetworkState& state, const LinkCoefficients& coeffs,
                        const LinkState& links, const PriceInputs& prices,
                        const ScenarioConfig& cfg) {
  UserState response;

  PowerSubproblem psub;
  psub.gain = links.h(q, q).cwiseAbs2();
  psub.mui = prices.mui;
  psub.p_prev = state[q].power;
  psub.prices = prices.pi_power;
  psub.tau = cfg.algo.tau;
  psub.budget = cfg.P_q;
  response.power = solve_power(psub, cfg.algo.bisect_tol).p;

  const int m_n = static_cast<int>(state[q].phi.cols());
  if (m_n == 0) {
    response.phi = ReflectionProfile(cfg.K, 0);
    response.lorentz = LorentzianParams::zeros(0);
    return response;
  }

  RisSubproblem rsub;
  rsub.linear = 2.0 * (own_phi_gradient(q, state, coeffs, links) + prices.pi_phi);
  rsub.phi_prev = state[q].phi;
  rsub.tau = cfg.algo.tau;
  rsub.params_init = state[q].lorentz;
  rsub.grid = omega_grid(cfg.K);
  rsub.bounds = cfg.algo.lorentz;

  PddResult rs = pdd_solve(rsub, cfg.algo.pdd);
  response.phi = std::move(rs.phi);
  response.lorentz = std::move(rs.params);
  return response;
}

UserState best_response(int q, const NetworkState& state, const ChannelSet& channels,
                        const ScenarioConfig& cfg) {
  const LinkCoefficients coeffs(channels);
  const LinkState links = compute_links(state, channels, coeffs, cfg.sigma_sq);
  DirectPriceSource source;
  const std::vector<PriceInputs> inputs = source.collect(state, coeffs, links, 0);
  return best_response(q, state, coeffs, links, inputs[q], cfg);
}

NetworkState combine_step(const NetworkState& state, const std::vector<UserState>& responses,
                          double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("combine_step: alpha must be in [0, 1]");
  NetworkState next(state.size());
  for (std::size_t q = 0; q < state.size(); ++q) {
    next[q].power = state[q].power + alpha * (responses[q].power - state[q].power);
    next[q].phi = state[q].phi + alpha * (responses[q].phi - state[q].phi);
    // Parameters jump to the response's fit; the profile they back is the
    // convex combination, re-fitted on the next response (or at finish()).
    next[q].lorentz = responses[q].lorentz;
  }
  return next;
}

double next_alpha(double alpha, double theta) { return alpha * (1.0 - theta * alpha); }

namespace {

double variable_movement(const NetworkState& prev, const NetworkState& next, double budget) {
  double metric = 0.0;
  for (std::size_t q = 0; q < prev.size(); ++q) {
    metric = std::max(metric,
                      (next[q].power - prev[q].power).abs().maxCoeff() / budget);
    if (prev[q].phi.size() > 0)
      metric = std::max(metric, (next[q].phi - prev[q].phi).cwiseAbs().maxCoeff());
  }
  return metric;
}

}  // namespace

DscaDriver::DscaDriver(const ScenarioConfig& cfg, const ChannelSet& channels,
                       PriceSource* source)
    : cfg_(cfg), channels_(channels), coeffs_(channels), source_(source) {
  cfg.validate();
  if (!source_) {
    owned_source_ = std::make_unique<DirectPriceSource>();
    source_ = owned_source_.get();
  }
  if (cfg.algo.update == UpdateOrder::gauss_seidel && source)
    throw ConfigError("algo.update: gauss_seidel supports the direct price source only");
  state_ = init_state(cfg);
  links_ = compute_links(state_, channels_, coeffs_, cfg.sigma_sq);
  rate_bps_ = sum_rate_nats(links_) / kLn2;
  alpha_ = cfg.algo.alpha0;
}

IterationRecord DscaDriver::iterate() {
  return cfg_.algo.update == UpdateOrder::jacobi ? iterate_jacobi() : iterate_gauss_seidel();
}

IterationRecord DscaDriver::iterate_jacobi() {
  const std::vector<PriceInputs> inputs = source_->collect(state_, coeffs_, links_, t_);

  std::vector<UserState> responses(cfg_.Q);
  for (int q = 0; q < cfg_.Q; ++q)
    responses[q] = best_response(q, state_, coeffs_, links_, inputs[q], cfg_);

  NetworkState next = combine_step(state_, responses, alpha_);
  LinkState next_links = compute_links(next, channels_, coeffs_, cfg_.sigma_sq);
  const double next_rate = sum_rate_nats(next_links) / kLn2;

  IterationRecord rec;
  rec.t = t_;
  rec.alpha = alpha_;
  rec.sum_rate_bps = next_rate;
  rec.user_rates_bps = ArrayXd(cfg_.Q);
  for (int q = 0; q < cfg_.Q; ++q) rec.user_rates_bps[q] = user_rate_nats(q, next_links) / kLn2;

  const double move = variable_movement(state_, next, cfg_.P_q);
  const double rate_change = std::abs(next_rate - rate_bps_) / std::max(std::abs(rate_bps_), 1e-12);
  rec.term_metric = std::max(move, rate_change);

  state_ = std::move(next);
  links_ = std::move(next_links);
  rate_bps_ = next_rate;
  alpha_ = next_alpha(alpha_, cfg_.algo.theta);
  apply_orbit_guard(rate_change, move);
  ++t_;
  // One sub-threshold iteration can be a lucky dip while the interference
  // dynamics still carry real hops; require a sustained streak.
  streak_ = rec.term_metric <= cfg_.algo.eps_term ? streak_ + 1 : 0;
  converged_ = streak_ >= 3;
  return rec;
}

// Damps the step when the sum rate shows no net trend over a 20-iteration
// window while variables still move (interference limit cycles), and during
// the terminal approach once the movement itself falls under the threshold.
// Transients and genuine slow climbs keep the full step.
void DscaDriver::apply_orbit_guard(double /*rate_change*/, double move) {
  recent_rates_.push_back(rate_bps_);
  const std::size_t window = 20;
  if (recent_rates_.size() < window) return;
  if (recent_rates_.size() > window) recent_rates_.erase(recent_rates_.begin());
  double first_half = 0.0, second_half = 0.0;
  for (std::size_t i = 0; i < window / 2; ++i) {
    first_half += recent_rates_[i];
    second_half += recent_rates_[i + window / 2];
  }
  first_half /= window / 2;
  second_half /= window / 2;
  const double trend = std::abs(second_half - first_half) / std::max(std::abs(second_half), 1e-12);
  if (trend <= 0.2 * cfg_.algo.eps_term &&
      (move > cfg_.algo.eps_term || streak_ > 0))
    alpha_ *= 0.7;
}

IterationRecord DscaDriver::iterate_gauss_seidel() {
  const NetworkState start = state_;
  for (int q = 0; q < cfg_.Q; ++q) {
    const LinkState links = compute_links(state_, channels_, coeffs_, cfg_.sigma_sq);
    DirectPriceSource direct;
    const std::vector<PriceInputs> inputs = direct.collect(state_, coeffs_, links, t_);
    UserState response = best_response(q, state_, coeffs_, links, inputs[q], cfg_);
    state_[q].power += alpha_ * (response.power - state_[q].power);
    state_[q].phi += alpha_ * (response.phi - state_[q].phi);
    state_[q].lorentz = response.lorentz;
  }
  links_ = compute_links(state_, channels_, coeffs_, cfg_.sigma_sq);
  const double next_rate = sum_rate_nats(links_) / kLn2;

  IterationRecord rec;
  rec.t = t_;
  rec.alpha = alpha_;
  rec.sum_rate_bps = next_rate;
  rec.user_rates_bps = ArrayXd(cfg_.Q);
  for (int q = 0; q < cfg_.Q; ++q) rec.user_rates_bps[q] = user_rate_nats(q, links_) / kLn2;
  const double move = variable_movement(start, state_, cfg_.P_q);
  const double rate_change = std::abs(next_rate - rate_bps_) / std::max(std::abs(rate_bps_), 1e-12);
  rec.term_metric = std::max(move, rate_change);

  rate_bps_ = next_rate;
  alpha_ = next_alpha(alpha_, cfg_.algo.theta);
  apply_orbit_guard(rate_change, move);
  ++t_;
  converged_ = rec.term_metric <= cfg_.algo.eps_term;
  return rec;
}

RunResult DscaDriver::finish(std::vector<IterationRecord> history) const {
  RunResult result;
  result.state = state_;
  result.converged = converged_;
  result.iterations = t_;

  // One final re-fit so the reported profiles are exactly realizable.
  if (cfg_.effective_m() > 0) {
    const ArrayXd grid = omega_grid(cfg_.K);
    for (UserState& u : result.state) {
      const FitResult fit =
          fit_lorentzian(u.phi, grid, u.lorentz, cfg_.algo.lorentz, FitOptions{100, 2});
      u.lorentz = enforce_unit_modulus(fit.params, grid, cfg_.algo.lorentz);
      u.phi = lorentzian_response(u.lorentz, grid);
    }
  }
  result.final_sum_rate_bps = sum_rate(result.state, channels_, cfg_.sigma_sq);
  result.history = std::move(history);
  return result;
}

RunResult run_dsca(const ScenarioConfig& cfg, const ChannelSet& channels, PriceSource* source) {
  DscaDriver driver(cfg, channels, source);
  std::vector<IterationRecord> history;
  history.reserve(cfg.algo.max_iter);
  for (int t = 0; t < cfg.algo.max_iter; ++t) {
    history.push_back(driver.iterate());
    if (driver.converged()) break;
  }
  return driver.finish(std::move(history));
}

std::string history_to_csv(const std::vector<IterationRecord>& history) {
  std::string out = "t,alpha,sum_rate_bps,term_metric";
  const int users = history.empty() ? 0 : static_cast<int>(history.front().user_rates_bps.size());
  for (int q = 0; q < users; ++q) out += ",rate_user" + std::to_string(q + 1);
  out += "\n";
  char buf[128];
  for (const IterationRecord& rec : history) {
    out += std::to_string(rec.t);
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g", rec.alpha, rec.sum_rate_bps,
                  rec.term_metric);
    out += buf;
    for (int q = 0; q < users; ++q) {
      std::snprintf(buf, sizeof(buf), ",%.17g", rec.user_rates_bps[q]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace rissim
