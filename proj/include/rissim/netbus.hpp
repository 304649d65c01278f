#pragma once

#include <array>
#include <cstddef>
#include <mutex>
#include <vector>

#include "rissim/dsca.hpp"
#include "rissim/rate_model.hpp"

namespace rissim {

// Interference-price payload sent from `from_user` (the victim, which
// measures the harm) to `to_user` (the interferer, which prices it in).
struct PriceMessage {
  int from_user = 0;
  int to_user = 0;
  int t = 0;
  ArrayXd power_prices;  // length K
  MatrixXcd phi_prices;  // K x M
};

// Locally measured interference-plus-noise, reported by a UE to its own BS.
struct MuiReport {
  int user = 0;
  int t = 0;
  ArrayXd mui;  // length K, >= noise power
};

struct Inbox {
  std::vector<PriceMessage> prices;  // sorted by from_user
  MuiReport mui;
};

// Serialized-size model: 8 bytes per real, 16 per complex, 24-byte header.
std::size_t message_bytes(const PriceMessage& msg);
std::size_t report_bytes(const MuiReport& rep);

struct MessageMeta {
  int from = 0, to = 0, t = 0;
  std::size_t bytes = 0;
  bool local = false;  // MUI reports never leave the user
};

struct RoundLog {
  int t = 0;
  std::vector<MessageMeta> messages;
};

using NeighborSets = std::vector<std::vector<int>>;
NeighborSets all_pairs(int users);

// Loss-free, in-order transport with a per-round delivery barrier: every
// expected message must be present before any inbox is handed out, and no
// message may be posted for a round other than the current one.
class SyncBus {
 public:
  explicit SyncBus(int users);

  void post(PriceMessage msg);
  void post(MuiReport rep);

  // Hands out all inboxes for round t and advances the barrier.
  // Throws ProtocolError when an expected message is missing.
  std::vector<Inbox> deliver_round(int t, const NeighborSets& neighbors);

  // Test hook: lose one message in transit.
  void inject_drop(int from, int to, int t);

  int current_round() const { return round_; }
  const std::vector<RoundLog>& log() const { return log_; }

 private:
  int users_;
  int round_ = 0;
  std::vector<PriceMessage> pending_prices_;
  std::vector<MuiReport> pending_reports_;
  std::vector<std::array<int, 3>> drops_;
  std::vector<RoundLog> log_;
  std::mutex mutex_;
};

// One synchronous price-exchange round: every user posts its outgoing price
// components toward its neighbors plus its own MUI report, then the barrier
// delivers. Aggregating an inbox reproduces the in-process price sums
// bit-for-bit (same terms, same order).
std::vector<Inbox> round_exchange(SyncBus& bus, const NetworkState& state,
                                  const LinkCoefficients& coeffs, const LinkState& links, int t,
                                  const NeighborSets& neighbors);

PriceInputs aggregate_inbox(const Inbox& inbox, int subcarriers, int elements);

struct OverheadReport {
  std::vector<std::size_t> bytes_per_round;  // inter-agent price traffic only
  std::size_t total_bytes = 0;
};
OverheadReport overhead_report(const std::vector<RoundLog>& log);

// Fault injection for robustness experiments (off by default): each price
// message is independently replaced, with probability drop_prob, by the
// sender's previous-round payload (stale_by_one) or by zeros. Exploratory
// only; the reliable barrier semantics stay intact.
struct BusFaults {
  double drop_prob = 0.0;
  bool stale_by_one = false;
  std::uint64_t seed = 0;
};

class BusPriceSource final : public PriceSource {
 public:
  explicit BusPriceSource(int users, NeighborSets neighbors = {}, BusFaults faults = {});

  std::vector<PriceInputs> collect(const NetworkState& state, const LinkCoefficients& coeffs,
                                   const LinkState& links, int t) override;

  const SyncBus& bus() const { return bus_; }

 private:
  SyncBus bus_;
  NeighborSets neighbors_;
  BusFaults faults_;
  std::vector<std::vector<PriceMessage>> last_payloads_;  // per (from,to), for stale delivery
};

}  // namespace rissim
