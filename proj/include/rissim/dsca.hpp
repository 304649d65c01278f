#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rissim/rate_model.hpp"
#include "rissim/scenario.hpp"

namespace rissim {

struct IterationRecord {
  int t = 0;
  double alpha = 0.0;
  double sum_rate_bps = 0.0;   // bps/Hz after the combine step
  double term_metric = 0.0;    // max of variable movement and relative rate change
  ArrayXd user_rates_bps;
};

// Per-user inputs for one best response: locally estimated MUI plus the
// aggregated interference prices received from the other users.
struct PriceInputs {
  ArrayXd mui;        // length K
  ArrayXd pi_power;   // length K, <= 0
  MatrixXcd pi_phi;   // K x M, Wirtinger convention
};

// Supplies all users' price inputs for one iteration. The direct source
// evaluates the gradients in-process; the bus source (netbus) exchanges them
// as messages. Both produce bit-identical aggregates.
class PriceSource {
 public:
  virtual ~PriceSource() = default;
  virtual std::vector<PriceInputs> collect(const NetworkState& state,
                                           const LinkCoefficients& coeffs,
                                           const LinkState& links, int t) = 0;
};

class DirectPriceSource final : public PriceSource {
 public:
  std::vector<PriceInputs> collect(const NetworkState& state, const LinkCoefficients& coeffs,
                                   const LinkState& links, int t) override;
};

// Uniform power, spread resonator parameters (realizable and feasible).
NetworkState init_state(const ScenarioConfig& cfg);

bool is_feasible(const NetworkState& state, const ScenarioConfig& cfg, double tol = 1e-9);

// Best response of user q at the frozen iterate: proximal water filling for
// the powers, penalty-decomposition surface fit for the profile.
UserState best_response(int q, const NetworkState& state, const LinkCoefficients& coeffs,
                        const LinkState& links, const PriceInputs& prices,
                        const ScenarioConfig& cfg);
// Convenience overload computing links and prices in-process.
UserState best_response(int q, const NetworkState& state, const ChannelSet& channels,
                        const ScenarioConfig& cfg);

// x <- x + alpha*(response - x), per user.
NetworkState combine_step(const NetworkState& state, const std::vector<UserState>& responses,
                          double alpha);

double next_alpha(double alpha, double theta);

struct RunResult {
  NetworkState state;  // realizable final state (parameters re-fitted once)
  std::vector<IterationRecord> history;
  bool converged = false;
  int iterations = 0;
  double final_sum_rate_bps = 0.0;
};

// Step-by-step driver (Jacobi across users; optional Gauss-Seidel sweep for
// experiments, direct price source only).
class DscaDriver {
 public:
  DscaDriver(const ScenarioConfig& cfg, const ChannelSet& channels,
             PriceSource* source = nullptr);

  const NetworkState& state() const { return state_; }
  double alpha() const { return alpha_; }
  double sum_rate_bps() const { return rate_bps_; }
  bool converged() const { return converged_; }
  int iteration() const { return t_; }

  IterationRecord iterate();

  // Realizability refresh + result assembly for the loop in run_dsca.
  RunResult finish(std::vector<IterationRecord> history) const;

 private:
  const ScenarioConfig& cfg_;
  const ChannelSet& channels_;
  LinkCoefficients coeffs_;
  std::unique_ptr<PriceSource> owned_source_;
  PriceSource* source_;
  NetworkState state_;
  LinkState links_;
  double rate_bps_;
  double alpha_;
  int t_ = 0;
  std::vector<double> recent_rates_;
  bool converged_ = false;

  IterationRecord iterate_jacobi();
  IterationRecord iterate_gauss_seidel();
  void apply_orbit_guard(double rate_change, double move);
};

RunResult run_dsca(const ScenarioConfig& cfg, const ChannelSet& channels,
                   PriceSource* source = nullptr);

// CSV with columns t, alpha, sum_rate_bps, term_metric, rate_user1..Q.
std::string history_to_csv(const std::vector<IterationRecord>& history);

}  // namespace rissim
