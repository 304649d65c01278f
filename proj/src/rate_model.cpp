#include "rissim/rate_model.hpp"

#include "rissim/errors.hpp"

namespace rissim {

LinkCoefficients::LinkCoefficients(const ChannelSet& channels) : q_(channels.users()) {
  cascade_.reserve(static_cast<std::size_t>(q_) * q_);
  for (int j = 0; j < q_; ++j)
    for (int q = 0; q < q_; ++q)
      cascade_.push_back(channels.ris_ue(j, q).cwiseProduct(channels.bs_ris(j)));
}

MatrixXcd LinkCoefficients::outer_matrix(int j, int q, int k) const {
  const VectorXcd v = cascade(j, q).row(k).transpose();
  return v.conjugate() * v.transpose();
}

Complex equivalent_channel(int j, int q, int k, const ChannelSet& channels,
                           const ReflectionProfile& phi_j) {
  Complex h = channels.direct(j, q)[k];
  for (int m = 0; m < channels.elements(); ++m)
    h += channels.ris_ue(j, q)(k, m) * channels.bs_ris(j)(k, m) * phi_j(k, m);
  return h;
}

LinkState compute_links(const NetworkState& state, const ChannelSet& channels,
                        const LinkCoefficients& coeffs, double sigma_sq) {
  const int q_n = channels.users();
  const int k_n = channels.subcarriers();

  LinkState links;
  links.users = q_n;
  links.h_eq.resize(static_cast<std::size_t>(q_n) * q_n);
  for (int j = 0; j < q_n; ++j)
    for (int q = 0; q < q_n; ++q) {
      VectorXcd h = channels.direct(j, q);
      if (channels.elements() > 0)
        h += coeffs.cascade(j, q).cwiseProduct(state[j].phi).rowwise().sum();
      links.h_eq[j * q_n + q] = std::move(h);
    }

  links.mui = ArrayXXd::Constant(q_n, k_n, sigma_sq);
  links.snr = ArrayXXd::Zero(q_n, k_n);
  for (int j = 0; j < q_n; ++j) {
    for (int q = 0; q < q_n; ++q) {
      if (q == j) continue;
      // interference at UE j caused by BS q
      for (int k = 0; k < k_n; ++k)
        links.mui(j, k) += std::norm(links.h(q, j)[k]) * state[q].power[k];
    }
    for (int k = 0; k < k_n; ++k)
      links.snr(j, k) = std::norm(links.h(j, j)[k]) * state[j].power[k] / links.mui(j, k);
  }
  return links;
}

double user_rate_nats(int q, const LinkState& links) {
  double r = 0.0;
  for (int k = 0; k < links.snr.cols(); ++k) r += std::log1p(links.snr(q, k));
  return r;
}

double sum_rate_nats(const LinkState& links) {
  double r = 0.0;
  for (int q = 0; q < links.users; ++q) r += user_rate_nats(q, links);
  return r;
}

double user_rate(int q, const NetworkState& state, const ChannelSet& channels, double sigma_sq) {
  const LinkCoefficients coeffs(channels);
  return user_rate_nats(q, compute_links(state, channels, coeffs, sigma_sq)) / kLn2;
}

double sum_rate(const NetworkState& state, const ChannelSet& channels, double sigma_sq) {
  const LinkCoefficients coeffs(channels);
  return sum_rate_nats(compute_links(state, channels, coeffs, sigma_sq)) / kLn2;
}

SnrMui snr_and_mui(const NetworkState& state, const ChannelSet& channels, double sigma_sq) {
  const LinkCoefficients coeffs(channels);
  LinkState links = compute_links(state, channels, coeffs, sigma_sq);
  return {std::move(links.snr), std::move(links.mui)};
}

PriceContribution price_contribution(int q, int j, const NetworkState& state,
                                     const LinkCoefficients& coeffs, const LinkState& links) {
  if (q == j) throw std::invalid_argument("price_contribution: q and j must differ");
  const int k_n = static_cast<int>(state[q].power.size());
  const int m_n = static_cast<int>(state[q].phi.cols());

  PriceContribution out;
  out.power = ArrayXd::Zero(k_n);
  out.phi = MatrixXcd::Zero(k_n, m_n);

  const VectorXcd& h_qj = links.h(q, j);  // channel BS q -> UE j
  for (int k = 0; k < k_n; ++k) {
    // d R_j / d MUI_jk scaled by how q's variables enter MUI_jk
    const double w = links.snr(j, k) / ((1.0 + links.snr(j, k)) * links.mui(j, k));
    out.power[k] = -std::norm(h_qj[k]) * w;
    if (m_n > 0) {
      const Complex lead = -state[q].power[k] * w * h_qj[k];
      out.phi.row(k) = lead * coeffs.cascade(q, j).row(k).conjugate();
    }
  }
  return out;
}

namespace {

ArrayXd power_prices_impl(int q, const NetworkState& state, const LinkCoefficients& coeffs,
                          const LinkState& links) {
  ArrayXd prices = ArrayXd::Zero(state[q].power.size());
  for (int j = 0; j < links.users; ++j) {
    if (j == q) continue;
    prices += price_contribution(q, j, state, coeffs, links).power;
  }
  return prices;
}

}  // namespace

ArrayXd power_prices(int q, const NetworkState& state, const ChannelSet& channels,
                     double sigma_sq) {
  const LinkCoefficients coeffs(channels);
  const LinkState links = compute_links(state, channels, coeffs, sigma_sq);
  return power_prices_impl(q, state, coeffs, links);
}

MatrixXcd own_phi_gradient(int q, const NetworkState& state, const LinkCoefficients& coeffs,
                           const LinkState& links) {
  const int k_n = static_cast<int>(state[q].phi.rows());
  const int m_n = static_cast<int>(state[q].phi.cols());
  MatrixXcd gamma = MatrixXcd::Zero(k_n, m_n);
  const VectorXcd& h_qq = links.h(q, q);
  for (int k = 0; k < k_n; ++k) {
    const Complex lead =
        state[q].power[k] / ((1.0 + links.snr(q, k)) * links.mui(q, k)) * h_qq[k];
    gamma.row(k) = lead * coeffs.cascade(q, q).row(k).conjugate();
  }
  return gamma;
}

PhiGradients phi_gradients(int q, const NetworkState& state, const ChannelSet& channels,
                           double sigma_sq) {
  const LinkCoefficients coeffs(channels);
  const LinkState links = compute_links(state, channels, coeffs, sigma_sq);

  PhiGradients out;
  out.gamma = own_phi_gradient(q, state, coeffs, links);
  out.pi_phi = MatrixXcd::Zero(state[q].phi.rows(), state[q].phi.cols());
  for (int j = 0; j < links.users; ++j) {
    if (j == q) continue;
    out.pi_phi += price_contribution(q, j, state, coeffs, links).phi;
  }
  return out;
}

}  // namespace rissim
