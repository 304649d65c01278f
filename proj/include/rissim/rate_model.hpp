#pragma once

#include <vector>

#include "rissim/channel.hpp"
#include "rissim/metasurface.hpp"
#include "rissim/types.hpp"

namespace rissim {

// Variables of one user: per-subcarrier transmit powers plus its surface
// profile and the resonator parameters that back it.
struct UserState {
  ArrayXd power;             // watts, length K
  ReflectionProfile phi;     // K x M
  LorentzianParams lorentz;  // M elements
};

using NetworkState = std::vector<UserState>;

// Cascaded BS j -> RIS j -> UE q coefficients:
//   cascade(j,q)(k,m) = ris_ue(j,q)(k,m) * bs_ris(j)(k,m),
// so H_jq[k] = direct(j,q)[k] + cascade(j,q).row(k) * phi_j.row(k)^T.
class LinkCoefficients {
 public:
  explicit LinkCoefficients(const ChannelSet& channels);

  int users() const { return q_; }
  const MatrixXcd& cascade(int j, int q) const { return cascade_[j * q_ + q]; }

  // Rank-1 matrix conj(v) v^T behind the quadratic |H|^2 terms. Diagnostics
  // only; gradient code works with the cascade vectors directly.
  MatrixXcd outer_matrix(int j, int q, int k) const;

 private:
  int q_;
  std::vector<MatrixXcd> cascade_;
};

// Equivalent channels and receiver-side statistics at one iterate.
struct LinkState {
  std::vector<VectorXcd> h_eq;  // (j,q) -> length-K equivalent channel
  ArrayXXd mui;                 // Q x K interference-plus-noise at UE j
  ArrayXXd snr;                 // Q x K desired-link SINR

  int users = 0;
  const VectorXcd& h(int j, int q) const { return h_eq[j * users + q]; }
};

Complex equivalent_channel(int j, int q, int k, const ChannelSet& channels,
                           const ReflectionProfile& phi_j);

LinkState compute_links(const NetworkState& state, const ChannelSet& channels,
                        const LinkCoefficients& coeffs, double sigma_sq);

double user_rate_nats(int q, const LinkState& links);
double sum_rate_nats(const LinkState& links);

// bps/Hz surfaces; natural-log values are internal currency everywhere else.
double user_rate(int q, const NetworkState& state, const ChannelSet& channels, double sigma_sq);
double sum_rate(const NetworkState& state, const ChannelSet& channels, double sigma_sq);

struct SnrMui {
  ArrayXXd snr;  // Q x K
  ArrayXXd mui;  // Q x K
};
SnrMui snr_and_mui(const NetworkState& state, const ChannelSet& channels, double sigma_sq);

// What victim j reports to transmitter q: the derivative of R_j (nats) with
// respect to q's powers (power part, <= 0) and with respect to conj(phi_q)
// (phi part, Wirtinger convention).
struct PriceContribution {
  ArrayXd power;   // length K
  MatrixXcd phi;   // K x M
};
PriceContribution price_contribution(int q, int j, const NetworkState& state,
                                     const LinkCoefficients& coeffs, const LinkState& links);

// Sum of price contributions over j != q, accumulated in ascending j order
// (the message bus reproduces the same order bit-for-bit).
ArrayXd power_prices(int q, const NetworkState& state, const ChannelSet& channels,
                     double sigma_sq);

// gamma = d R_q / d conj(phi_q); pi_phi = sum_{j != q} d R_j / d conj(phi_q).
// Both in nats and Wirtinger convention: the first-order change of the rate
// under a perturbation dphi is 2*Re<grad, dphi>.
struct PhiGradients {
  MatrixXcd gamma;   // K x M
  MatrixXcd pi_phi;  // K x M
};
PhiGradients phi_gradients(int q, const NetworkState& state, const ChannelSet& channels,
                           double sigma_sq);

MatrixXcd own_phi_gradient(int q, const NetworkState& state, const LinkCoefficients& coeffs,
                           const LinkState& links);

}  // namespace rissim
