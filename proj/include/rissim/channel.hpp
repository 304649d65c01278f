#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rissim/scenario.hpp"
#include "rissim/types.hpp"

namespace rissim {

// Frequency-domain channels of one fading block. direct(j,q) is the
// BS j -> UE q response over subcarriers; ris_ue(j,q) and bs_ris(j) hold the
// per-element segment channels with (subcarrier, element) layout.
class ChannelSet {
 public:
  ChannelSet(int users, int subcarriers, int elements);

  int users() const { return q_; }
  int subcarriers() const { return k_; }
  int elements() const { return m_; }

  VectorXcd& direct(int j, int q) { return direct_[idx(j, q)]; }
  const VectorXcd& direct(int j, int q) const { return direct_[idx(j, q)]; }

  MatrixXcd& ris_ue(int j, int q) { return ris_ue_[idx(j, q)]; }
  const MatrixXcd& ris_ue(int j, int q) const { return ris_ue_[idx(j, q)]; }

  MatrixXcd& bs_ris(int j) { return bs_ris_[j]; }
  const MatrixXcd& bs_ris(int j) const { return bs_ris_[j]; }

 private:
  int idx(int j, int q) const { return j * q_ + q; }

  int q_, k_, m_;
  std::vector<VectorXcd> direct_;
  std::vector<MatrixXcd> ris_ue_;
  std::vector<MatrixXcd> bs_ris_;
};

// K x L matrix with entries exp(-j*2*pi*(k-1)*i/K), k = 1..K, i = 0..L-1.
MatrixXcd dft_matrix(int subcarriers, int taps);

// K-point response of an L-tap impulse response (zero padded). L <= K.
VectorXcd dft_taps(const VectorXcd& taps, int subcarriers);

// Rayleigh taps per link (unit variance, pathloss-scaled) transformed to
// per-subcarrier responses. Pure function of (cfg, seed): per-link substreams
// are derived by hashing (link kind, j, q, m), so draws for existing links do
// not change when Q or M grows.
ChannelSet generate_channels(const ScenarioConfig& cfg, std::uint64_t seed);

// Fingerprint of the direct-channel draws; equal across paired runs that
// share (geometry, seed) regardless of RIS dimensioning.
std::uint64_t direct_channel_hash(const ChannelSet& channels);

// JSON dump with [re, im] pairs, for cross-implementation comparison.
std::string channels_to_json_text(const ChannelSet& channels);

}  // namespace rissim
