#include <doctest.h>

#include "rissim/channel.hpp"
#include "rissim/errors.hpp"
#include "rissim/rng.hpp"

using namespace rissim;

namespace {

ScenarioConfig single_link_config() {
  ScenarioConfig cfg = default_scenario(2);
  cfg.Q = 1;
  cfg.bs = {Vec2(0, 0)};
  cfg.ris = {Vec2(-5, 2.5)};
  cfg.ue = {Vec2(10, 30)};
  cfg.M = 0;
  cfg.ris_enabled = false;
  cfg.K = 8;
  cfg.L = 4;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("dft of an impulse is flat") {
  VectorXcd taps = VectorXcd::Zero(4);
  taps[0] = 1.0;
  const VectorXcd h = dft_taps(taps, 16);
  for (int k = 0; k < 16; ++k) {
    CHECK(h[k].real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h[k].imag() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("dft of a delayed tap") {
  VectorXcd taps(2);
  taps << Complex(0, 0), Complex(1, 0);
  const VectorXcd h = dft_taps(taps, 4);
  // exp(-j*2*pi*(k-1)/4) for k = 1..4
  CHECK(std::abs(h[0] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(h[1] - Complex(0, -1)) < 1e-14);
  CHECK(std::abs(h[2] - Complex(-1, 0)) < 1e-14);
  CHECK(std::abs(h[3] - Complex(0, 1)) < 1e-14);
}

TEST_CASE("dft preserves energy") {
  SplitMix64 rng(7);
  VectorXcd taps(3);
  for (int i = 0; i < 3; ++i) {
    double a, b;
    rng.normal_pair(a, b);
    taps[i] = Complex(a, b);
  }
  const int k_n = 8;
  const VectorXcd h = dft_taps(taps, k_n);
  CHECK(h.squaredNorm() == doctest::Approx(k_n * taps.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("dft rejects too many taps") {
  CHECK_THROWS_AS(dft_taps(VectorXcd::Zero(5), 4), DimensionError);
}

TEST_CASE("single tap gives a flat link response") {
  ScenarioConfig cfg = single_link_config();
  cfg.L = 1;
  const ChannelSet ch = generate_channels(cfg, 3);
  const VectorXcd& h = ch.direct(0, 0);
  for (int k = 1; k < cfg.K; ++k) CHECK(std::abs(h[k] - h[0]) < 1e-15);

  // the flat value is the tap itself, which carries the amplitude pathloss
  const double amp =
      pathloss_amplitude(cfg.bs[0], cfg.ue[0], cfg.alpha_direct, cfg.pl0_db, cfg.d0);
  // |tap| is Rayleigh distributed around amp; just confirm scaling is sane
  CHECK(std::abs(h[0]) < 20 * amp);
  CHECK(std::abs(h[0]) > amp / 1000);
}

TEST_CASE("determinism and seed sensitivity") {
  ScenarioConfig cfg = default_scenario(2);
  cfg.M = 3;
  cfg.K = 8;
  const ChannelSet a = generate_channels(cfg, 11);
  const ChannelSet b = generate_channels(cfg, 11);
  const ChannelSet c = generate_channels(cfg, 12);
  CHECK((a.direct(0, 1) - b.direct(0, 1)).norm() == 0.0);
  CHECK((a.ris_ue(1, 0) - b.ris_ue(1, 0)).norm() == 0.0);
  CHECK((a.bs_ris(0) - b.bs_ris(0)).norm() == 0.0);
  CHECK((a.direct(0, 1) - c.direct(0, 1)).norm() > 0.0);
}

TEST_CASE("substreams survive dimension growth") {
  ScenarioConfig small = default_scenario(2);
  small.M = 2;
  small.K = 8;
  ScenarioConfig big = small;
  big.M = 5;
  const ChannelSet a = generate_channels(small, 21);
  const ChannelSet b = generate_channels(big, 21);
  // adding elements must not disturb the draws of existing ones
  CHECK((a.ris_ue(0, 1) - b.ris_ue(0, 1).leftCols(2)).norm() == 0.0);
  CHECK((a.bs_ris(1) - b.bs_ris(1).leftCols(2)).norm() == 0.0);

  // adding a user must not disturb existing links
  const ScenarioConfig three = [&] {
    ScenarioConfig cfg = default_scenario(3);
    cfg.M = 2;
    cfg.K = 8;
    return cfg;
  }();
  const ChannelSet c = generate_channels(three, 21);
  CHECK((a.direct(1, 0) - c.direct(1, 0)).norm() == 0.0);
  CHECK((a.ris_ue(1, 1) - c.ris_ue(1, 1)).norm() == 0.0);
}

TEST_CASE("mean link energy matches the tap count") {
  ScenarioConfig cfg = single_link_config();
  const double amp =
      pathloss_amplitude(cfg.bs[0], cfg.ue[0], cfg.alpha_direct, cfg.pl0_db, cfg.d0);
  const double pl = amp * amp;

  double acc = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const ChannelSet ch = generate_channels(cfg, 1000 + s);
    acc += ch.direct(0, 0).squaredNorm() / (cfg.K * pl);
  }
  const double mean = acc / seeds;
  CHECK(mean == doctest::Approx(cfg.L).epsilon(0.05));
}

TEST_CASE("distinct links are uncorrelated") {
  ScenarioConfig cfg = default_scenario(2);
  cfg.M = 1;
  cfg.K = 4;
  Complex acc(0, 0);
  double pow_a = 0.0, pow_b = 0.0;
  const int seeds = 2000;
  for (int s = 0; s < seeds; ++s) {
    const ChannelSet ch = generate_channels(cfg, 500 + s);
    const Complex a = ch.direct(0, 0)[0];
    const Complex b = ch.direct(1, 0)[0];
    acc += a * std::conj(b);
    pow_a += std::norm(a);
    pow_b += std::norm(b);
  }
  const double corr = std::abs(acc) / std::sqrt(pow_a * pow_b);
  CHECK(corr < 0.1);
}

TEST_CASE("responses are supported on the first L taps") {
  ScenarioConfig cfg = default_scenario(2);
  cfg.M = 2;
  cfg.K = 16;
  cfg.L = 4;
  const ChannelSet ch = generate_channels(cfg, 5);
  const MatrixXcd inv = dft_matrix(cfg.K, cfg.K).adjoint() / cfg.K;

  auto support_ok = [&](const VectorXcd& h) {
    const VectorXcd taps = inv * h;
    const double total = taps.squaredNorm();
    const double head = taps.head(cfg.L).squaredNorm();
    return head >= (1.0 - 1e-10) * total;
  };
  for (int j = 0; j < cfg.Q; ++j)
    for (int q = 0; q < cfg.Q; ++q) {
      CHECK(support_ok(ch.direct(j, q)));
      for (int m = 0; m < cfg.M; ++m) CHECK(support_ok(ch.ris_ue(j, q).col(m)));
    }
}

TEST_CASE("direct hash pairs baseline and ris variants") {
  ScenarioConfig with = default_scenario(2);
  with.M = 4;
  ScenarioConfig without = with;
  without.ris_enabled = false;
  const std::uint64_t h1 = direct_channel_hash(generate_channels(with, 9));
  const std::uint64_t h2 = direct_channel_hash(generate_channels(without, 9));
  CHECK(h1 == h2);
  const std::uint64_t h3 = direct_channel_hash(generate_channels(with, 10));
  CHECK(h1 != h3);
}

TEST_CASE("channel json dump") {
  ScenarioConfig cfg = default_scenario(2);
  cfg.M = 1;
  cfg.K = 2;
  cfg.L = 2;
  const std::string text = channels_to_json_text(generate_channels(cfg, 1));
  CHECK(text.find("\"h_direct\"") != std::string::npos);
  CHECK(text.find("\"g_ris\"") != std::string::npos);
  CHECK(text.find("\"h_bs_ris\"") != std::string::npos);
}

TEST_SUITE_END();
