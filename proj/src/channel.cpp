#include "rissim/channel.hpp"

#include <cstring>

#include <json.hpp>

#include "rissim/errors.hpp"
#include "rissim/rng.hpp"

namespace rissim {

ChannelSet::ChannelSet(int users, int subcarriers, int elements)
    : q_(users), k_(subcarriers), m_(elements) {
  direct_.assign(static_cast<std::size_t>(q_) * q_, VectorXcd::Zero(k_));
  ris_ue_.assign(static_cast<std::size_t>(q_) * q_, MatrixXcd::Zero(k_, m_));
  bs_ris_.assign(q_, MatrixXcd::Zero(k_, m_));
}

MatrixXcd dft_matrix(int subcarriers, int taps) {
  if (taps > subcarriers) throw DimensionError("dft_matrix: more taps than subcarriers");
  MatrixXcd e(subcarriers, taps);
  for (int k = 0; k < subcarriers; ++k)
    for (int i = 0; i < taps; ++i) {
      const double phase = -2.0 * M_PI * static_cast<double>(k) * i / subcarriers;
      e(k, i) = Complex(std::cos(phase), std::sin(phase));
    }
  return e;
}

VectorXcd dft_taps(const VectorXcd& taps, int subcarriers) {
  if (taps.size() > subcarriers) throw DimensionError("dft_taps: more taps than subcarriers");
  return dft_matrix(subcarriers, static_cast<int>(taps.size())) * taps;
}

namespace {

enum LinkKind : std::uint64_t { kDirect = 1, kRisUe = 2, kBsRis = 3 };

// One tap sequence: i.i.d. CN(0,1) entries scaled by the amplitude pathloss.
VectorXcd draw_taps(std::uint64_t seed, LinkKind kind, int j, int q, int m, int taps,
                    double amplitude) {
  std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(kind));
  s = mix_seed(s, static_cast<std::uint64_t>(j));
  s = mix_seed(s, static_cast<std::uint64_t>(q));
  s = mix_seed(s, static_cast<std::uint64_t>(m));
  SplitMix64 rng(s);

  VectorXcd h(taps);
  const double scale = amplitude * M_SQRT1_2;  // Re/Im variance 1/2 each
  for (int i = 0; i < taps; ++i) {
    double re, im;
    rng.normal_pair(re, im);
    h[i] = Complex(scale * re, scale * im);
  }
  return h;
}

}  // namespace

ChannelSet generate_channels(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int q_n = cfg.Q;
  const int k_n = cfg.K;
  const int m_n = cfg.effective_m();
  const int l_n = cfg.L;

  ChannelSet out(q_n, k_n, m_n);
  const MatrixXcd e = dft_matrix(k_n, l_n);

  for (int j = 0; j < q_n; ++j) {
    for (int q = 0; q < q_n; ++q) {
      const double amp_d =
          pathloss_amplitude(cfg.bs[j], cfg.ue[q], cfg.alpha_direct, cfg.pl0_db, cfg.d0);
      out.direct(j, q) = e * draw_taps(seed, kDirect, j, q, 0, l_n, amp_d);

      if (m_n > 0) {
        const double amp_g =
            pathloss_amplitude(cfg.ris[j], cfg.ue[q], cfg.alpha_ris, cfg.pl0_db, cfg.d0);
        MatrixXcd taps(l_n, m_n);
        for (int m = 0; m < m_n; ++m) taps.col(m) = draw_taps(seed, kRisUe, j, q, m, l_n, amp_g);
        out.ris_ue(j, q) = e * taps;
      }
    }
    if (m_n > 0) {
      const double amp_h =
          pathloss_amplitude(cfg.bs[j], cfg.ris[j], cfg.alpha_ris, cfg.pl0_db, cfg.d0);
      MatrixXcd taps(l_n, m_n);
      for (int m = 0; m < m_n; ++m) taps.col(m) = draw_taps(seed, kBsRis, j, j, m, l_n, amp_h);
      out.bs_ris(j) = e * taps;
    }
  }
  return out;
}

std::uint64_t direct_channel_hash(const ChannelSet& channels) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the raw doubles
  auto absorb = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffull;
      h *= 0x100000001b3ull;
    }
  };
  for (int j = 0; j < channels.users(); ++j)
    for (int q = 0; q < channels.users(); ++q)
      for (int k = 0; k < channels.subcarriers(); ++k) {
        absorb(channels.direct(j, q)[k].real());
        absorb(channels.direct(j, q)[k].imag());
      }
  return h;
}

namespace {

nlohmann::json complex_vector(const VectorXcd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
  return arr;
}

nlohmann::json complex_matrix(const MatrixXcd& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    arr.push_back(std::move(row));
  }
  return arr;
}

}  // namespace

std::string channels_to_json_text(const ChannelSet& channels) {
  nlohmann::ordered_json j;
  j["Q"] = channels.users();
  j["K"] = channels.subcarriers();
  j["M"] = channels.elements();
  nlohmann::json direct = nlohmann::json::array();
  nlohmann::json ris_ue = nlohmann::json::array();
  nlohmann::json bs_ris = nlohmann::json::array();
  for (int a = 0; a < channels.users(); ++a) {
    nlohmann::json drow = nlohmann::json::array();
    nlohmann::json grow = nlohmann::json::array();
    for (int b = 0; b < channels.users(); ++b) {
      drow.push_back(complex_vector(channels.direct(a, b)));
      grow.push_back(complex_matrix(channels.ris_ue(a, b)));
    }
    direct.push_back(std::move(drow));
    ris_ue.push_back(std::move(grow));
    bs_ris.push_back(complex_matrix(channels.bs_ris(a)));
  }
  j["h_direct"] = std::move(direct);
  j["g_ris"] = std::move(ris_ue);
  j["h_bs_ris"] = std::move(bs_ris);
  return j.dump(2) + "\n";
}

}  // namespace rissim
