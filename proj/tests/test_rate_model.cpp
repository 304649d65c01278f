#include <doctest.h>

#include "rissim/oracle.hpp"
#include "rissim/rate_model.hpp"
#include "rissim/rng.hpp"

using namespace rissim;

namespace {

Complex random_cn(SplitMix64& rng, double scale = 1.0) {
  double a, b;
  rng.normal_pair(a, b);
  return Complex(scale * a, scale * b);
}

// Hand-built channel set with unit-variance random entries.
ChannelSet random_channels(int q_n, int k_n, int m_n, std::uint64_t seed, double cross = 1.0) {
  ChannelSet ch(q_n, k_n, m_n);
  SplitMix64 rng(seed);
  for (int j = 0; j < q_n; ++j) {
    for (int q = 0; q < q_n; ++q) {
      const double scale = (j == q) ? 1.0 : cross;
      for (int k = 0; k < k_n; ++k) ch.direct(j, q)[k] = random_cn(rng, scale);
      for (int m = 0; m < m_n; ++m)
        for (int k = 0; k < k_n; ++k) ch.ris_ue(j, q)(k, m) = random_cn(rng, scale);
    }
    for (int m = 0; m < m_n; ++m)
      for (int k = 0; k < k_n; ++k) ch.bs_ris(j)(k, m) = random_cn(rng);
  }
  return ch;
}

NetworkState random_state(int q_n, int k_n, int m_n, std::uint64_t seed, double budget = 1.0) {
  NetworkState state(q_n);
  SplitMix64 rng(seed);
  for (int q = 0; q < q_n; ++q) {
    state[q].power = ArrayXd(k_n);
    for (int k = 0; k < k_n; ++k) state[q].power[k] = rng.uniform01() * budget / k_n;
    state[q].phi = ReflectionProfile(k_n, m_n);
    for (int m = 0; m < m_n; ++m)
      for (int k = 0; k < k_n; ++k) state[q].phi(k, m) = 0.6 * random_cn(rng, 0.5);
    state[q].lorentz = LorentzianParams::zeros(m_n);
  }
  return state;
}

}  // namespace

TEST_SUITE_BEGIN("rate_model");

TEST_CASE("equivalent channel reduces to the direct path") {
  const ChannelSet ch = random_channels(2, 4, 3, 1);
  const ReflectionProfile phi = ReflectionProfile::Zero(4, 3);
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(equivalent_channel(0, 1, k, ch, phi) - ch.direct(0, 1)[k]) < 1e-15);
}

TEST_CASE("single element passthrough") {
  ChannelSet ch(1, 1, 1);
  ch.direct(0, 0)[0] = Complex(0, 0);
  ch.ris_ue(0, 0)(0, 0) = Complex(1, 0);
  ch.bs_ris(0)(0, 0) = Complex(1, 0);
  ReflectionProfile phi(1, 1);
  phi(0, 0) = Complex(0.3, -0.4);
  CHECK(std::abs(equivalent_channel(0, 0, 0, ch, phi) - phi(0, 0)) < 1e-15);
}

TEST_CASE("equivalent channel matches a brute force sum") {
  const ChannelSet ch = random_channels(2, 4, 4, 2);
  SplitMix64 rng(3);
  ReflectionProfile phi(4, 4);
  for (int m = 0; m < 4; ++m)
    for (int k = 0; k < 4; ++k) phi(k, m) = random_cn(rng, 0.4);

  for (int j = 0; j < 2; ++j)
    for (int q = 0; q < 2; ++q)
      for (int k = 0; k < 4; ++k) {
        Complex want = ch.direct(j, q)[k];
        for (int m = 0; m < 4; ++m)
          want += ch.ris_ue(j, q)(k, m) * ch.bs_ris(j)(k, m) * phi(k, m);
        CHECK(std::abs(equivalent_channel(j, q, k, ch, phi) - want) < 1e-12);
      }
}

TEST_CASE("cascade coefficients are the elementwise product") {
  const ChannelSet ch = random_channels(2, 3, 2, 4);
  const LinkCoefficients coeffs(ch);
  for (int j = 0; j < 2; ++j)
    for (int q = 0; q < 2; ++q)
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 2; ++m)
          CHECK(coeffs.cascade(j, q)(k, m) ==
                ch.ris_ue(j, q)(k, m) * ch.bs_ris(j)(k, m));
}

TEST_CASE("outer matrices have rank one") {
  const ChannelSet ch = random_channels(2, 3, 4, 5);
  const LinkCoefficients coeffs(ch);
  const MatrixXcd a = coeffs.outer_matrix(0, 1, 2);
  const Eigen::JacobiSVD<MatrixXcd> svd(a);
  CHECK(svd.singularValues()[0] > 0.0);
  for (int i = 1; i < svd.singularValues().size(); ++i)
    CHECK(svd.singularValues()[i] <= 1e-12 * svd.singularValues()[0]);
}

TEST_CASE("rate of a unit-SINR single user") {
  ChannelSet ch(1, 1, 0);
  ch.direct(0, 0)[0] = Complex(1.0, 0.0);
  NetworkState state(1);
  const double sigma_sq = 1e-3;
  state[0].power = ArrayXd::Constant(1, sigma_sq);  // |H|^2 p / sigma^2 = 1
  state[0].phi = ReflectionProfile(1, 0);
  state[0].lorentz = LorentzianParams::zeros(0);
  CHECK(user_rate(0, state, ch, sigma_sq) == doctest::Approx(1.0).epsilon(1e-12));

  state[0].power[0] = 0.0;
  CHECK(user_rate(0, state, ch, sigma_sq) == doctest::Approx(0.0));
}

TEST_CASE("rate of the symmetric two-user instance") {
  ChannelSet ch(2, 1, 0);
  const double sigma_sq = 1.0;
  // |H_qq|^2 p = 3 sigma^2, |H_jq|^2 p = sigma^2 with p = 1
  ch.direct(0, 0)[0] = Complex(std::sqrt(3.0), 0);
  ch.direct(1, 1)[0] = Complex(std::sqrt(3.0), 0);
  ch.direct(0, 1)[0] = Complex(1, 0);
  ch.direct(1, 0)[0] = Complex(1, 0);
  NetworkState state(2);
  for (int q = 0; q < 2; ++q) {
    state[q].power = ArrayXd::Constant(1, 1.0);
    state[q].phi = ReflectionProfile(1, 0);
    state[q].lorentz = LorentzianParams::zeros(0);
  }
  CHECK(user_rate(0, state, ch, sigma_sq) ==
        doctest::Approx(std::log2(2.5)).epsilon(1e-12));
  CHECK(std::log2(2.5) == doctest::Approx(1.3219).epsilon(1e-4));
}

TEST_CASE("sum rate is additive") {
  const ChannelSet ch = random_channels(2, 4, 2, 6);
  NetworkState state = random_state(2, 4, 2, 7);
  const double sigma_sq = 0.5;
  CHECK(sum_rate(state, ch, sigma_sq) ==
        doctest::Approx(user_rate(0, state, ch, sigma_sq) + user_rate(1, state, ch, sigma_sq))
            .epsilon(1e-12));

  for (auto& u : state) u.power.setZero();
  CHECK(sum_rate(state, ch, sigma_sq) == doctest::Approx(0.0));
}

TEST_CASE("snr and mui are consistent with the rates") {
  const ChannelSet ch = random_channels(3, 4, 2, 8);
  const NetworkState state = random_state(3, 4, 2, 9);
  const double sigma_sq = 0.3;
  const SnrMui sm = snr_and_mui(state, ch, sigma_sq);

  CHECK((sm.mui >= sigma_sq - 1e-15).all());
  for (int q = 0; q < 3; ++q) {
    double rate = 0.0;
    for (int k = 0; k < 4; ++k) rate += std::log2(1.0 + sm.snr(q, k));
    CHECK(rate == doctest::Approx(user_rate(q, state, ch, sigma_sq)).epsilon(1e-12));
  }
}

TEST_CASE("unit snr when power equals noise over gain") {
  ChannelSet ch(1, 2, 0);
  ch.direct(0, 0)[0] = Complex(2.0, 0.0);
  ch.direct(0, 0)[1] = Complex(0.0, 0.5);
  NetworkState state(1);
  const double sigma_sq = 0.7;
  state[0].power = ArrayXd(2);
  state[0].power[0] = sigma_sq / 4.0;
  state[0].power[1] = sigma_sq / 0.25;
  state[0].phi = ReflectionProfile(2, 0);
  state[0].lorentz = LorentzianParams::zeros(0);
  const SnrMui sm = snr_and_mui(state, ch, sigma_sq);
  CHECK(sm.snr(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sm.snr(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("prices vanish without victims or coupling") {
  const ChannelSet solo = random_channels(1, 3, 2, 10);
  const NetworkState solo_state = random_state(1, 3, 2, 11);
  CHECK(power_prices(0, solo_state, solo, 0.1).abs().maxCoeff() == 0.0);
  CHECK(phi_gradients(0, solo_state, solo, 0.1).pi_phi.cwiseAbs().maxCoeff() == 0.0);

  ChannelSet ch = random_channels(2, 3, 2, 12, 0.0);  // zero cross links
  for (int k = 0; k < 3; ++k) {
    ch.direct(0, 1)[k] = 0.0;
    ch.direct(1, 0)[k] = 0.0;
  }
  ch.ris_ue(0, 1).setZero();
  ch.ris_ue(1, 0).setZero();
  const NetworkState state = random_state(2, 3, 2, 13);
  CHECK(power_prices(0, state, ch, 0.1).abs().maxCoeff() == 0.0);
}

TEST_CASE("prices are nonpositive") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ChannelSet ch = random_channels(3, 3, 2, 100 + seed);
    const NetworkState state = random_state(3, 3, 2, 200 + seed);
    for (int q = 0; q < 3; ++q)
      CHECK((power_prices(q, state, ch, 0.2) <= 1e-15).all());
  }
}

TEST_CASE("zero own power kills the own-profile gradient") {
  const ChannelSet ch = random_channels(2, 3, 2, 14);
  NetworkState state = random_state(2, 3, 2, 15);
  state[0].power.setZero();
  const PhiGradients g = phi_gradients(0, state, ch, 0.1);
  CHECK(g.gamma.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.pi_phi.cwiseAbs().maxCoeff() == 0.0);  // no power, no interference caused
}

TEST_CASE("analytic gradients match finite differences") {
  const double sigma_sq = 0.4;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int q_n = 2, k_n = 2, m_n = 2;
    const ChannelSet ch = random_channels(q_n, k_n, m_n, 300 + seed, 0.7);
    const NetworkState state = random_state(q_n, k_n, m_n, 400 + seed);

    for (int q = 0; q < q_n; ++q) {
      auto others_p = [&](const ArrayXd& p) {
        NetworkState probe = state;
        probe[q].power = p;
        const LinkCoefficients coeffs(ch);
        const LinkState links = compute_links(probe, ch, coeffs, sigma_sq);
        double r = 0.0;
        for (int j = 0; j < q_n; ++j)
          if (j != q) r += user_rate_nats(j, links);
        return r;
      };
      const ArrayXd fd = oracle::fd_gradient(others_p, state[q].power, 1e-6);
      const ArrayXd analytic = power_prices(q, state, ch, sigma_sq);
      CHECK((analytic - fd).abs().maxCoeff() <=
            1e-5 * std::max(fd.abs().maxCoeff(), 1e-12));

      auto own_phi = [&](const MatrixXcd& phi) {
        NetworkState probe = state;
        probe[q].phi = phi;
        const LinkCoefficients coeffs(ch);
        return user_rate_nats(q, compute_links(probe, ch, coeffs, sigma_sq));
      };
      auto others_phi = [&](const MatrixXcd& phi) {
        NetworkState probe = state;
        probe[q].phi = phi;
        const LinkCoefficients coeffs(ch);
        const LinkState links = compute_links(probe, ch, coeffs, sigma_sq);
        double r = 0.0;
        for (int j = 0; j < q_n; ++j)
          if (j != q) r += user_rate_nats(j, links);
        return r;
      };
      const PhiGradients g = phi_gradients(q, state, ch, sigma_sq);
      const MatrixXcd fd_gamma = oracle::fd_gradient_complex(own_phi, state[q].phi, 1e-6);
      const MatrixXcd fd_pi = oracle::fd_gradient_complex(others_phi, state[q].phi, 1e-6);
      CHECK((g.gamma - fd_gamma).cwiseAbs().maxCoeff() <=
            1e-5 * std::max(fd_gamma.cwiseAbs().maxCoeff(), 1e-12));
      CHECK((g.pi_phi - fd_pi).cwiseAbs().maxCoeff() <=
            1e-5 * std::max(fd_pi.cwiseAbs().maxCoeff(), 1e-12));
    }
  }
}

TEST_CASE("single user rate is nondecreasing in power") {
  const ChannelSet ch = random_channels(1, 4, 2, 16);
  NetworkState state = random_state(1, 4, 2, 17);
  const double sigma_sq = 0.05;
  double prev = -1.0;
  for (double scale = 0.1; scale < 3.0; scale += 0.3) {
    NetworkState probe = state;
    probe[0].power = state[0].power * scale;
    const double rate = user_rate(0, probe, ch, sigma_sq);
    CHECK(rate >= prev);
    prev = rate;
  }
}

TEST_CASE("sum rate is invariant under user relabeling") {
  const int q_n = 2, k_n = 3, m_n = 2;
  const ChannelSet ch = random_channels(q_n, k_n, m_n, 18);
  const NetworkState state = random_state(q_n, k_n, m_n, 19);
  const double sigma_sq = 0.2;

  // swap the two users and all their channels
  ChannelSet swapped(q_n, k_n, m_n);
  auto s = [](int idx) { return 1 - idx; };
  for (int j = 0; j < q_n; ++j) {
    for (int q = 0; q < q_n; ++q) {
      swapped.direct(s(j), s(q)) = ch.direct(j, q);
      swapped.ris_ue(s(j), s(q)) = ch.ris_ue(j, q);
    }
    swapped.bs_ris(s(j)) = ch.bs_ris(j);
  }
  NetworkState swapped_state = {state[1], state[0]};

  CHECK(sum_rate(state, ch, sigma_sq) ==
        doctest::Approx(sum_rate(swapped_state, swapped, sigma_sq)).epsilon(1e-12));
}

TEST_CASE("fd oracle sanity") {
  auto square = [](const ArrayXd& x) { return x[0] * x[0]; };
  ArrayXd x0(1);
  x0 << 1.0;
  CHECK(oracle::fd_gradient(square, x0, 1e-4)[0] == doctest::Approx(2.0).epsilon(1e-7));

  auto constant = [](const ArrayXd&) { return 3.5; };
  CHECK(oracle::fd_gradient(constant, x0, 1e-4)[0] == doctest::Approx(0.0));

  // composite: own rate derivative along powers for a single user
  const ChannelSet ch = random_channels(1, 2, 0, 20);
  const NetworkState state = random_state(1, 2, 0, 21);
  const double sigma_sq = 0.1;
  auto own = [&](const ArrayXd& p) {
    NetworkState probe = state;
    probe[0].power = p;
    const LinkCoefficients coeffs(ch);
    return user_rate_nats(0, compute_links(probe, ch, coeffs, sigma_sq));
  };
  const ArrayXd fd = oracle::fd_gradient(own, state[0].power, 1e-6);
  for (int k = 0; k < 2; ++k) {
    const double g = std::norm(ch.direct(0, 0)[k]);
    const double analytic = g / (sigma_sq + g * state[0].power[k]);
    CHECK(fd[k] == doctest::Approx(analytic).epsilon(1e-5));
  }
}

TEST_SUITE_END();
