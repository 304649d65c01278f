#include "rissim/netbus.hpp"

#include <algorithm>
#include <array>

#include "rissim/errors.hpp"
#include "rissim/rng.hpp"

namespace rissim {

std::size_t message_bytes(const PriceMessage& msg) {
  return 24 + 8 * static_cast<std::size_t>(msg.power_prices.size()) +
         16 * static_cast<std::size_t>(msg.phi_prices.size());
}

std::size_t report_bytes(const MuiReport& rep) {
  return 24 + 8 * static_cast<std::size_t>(rep.mui.size());
}

NeighborSets all_pairs(int users) {
  NeighborSets sets(users);
  for (int j = 0; j < users; ++j)
    for (int q = 0; q < users; ++q)
      if (q != j) sets[j].push_back(q);
  return sets;
}

SyncBus::SyncBus(int users) : users_(users) {}

void SyncBus::post(PriceMessage msg) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (msg.t != round_)
    throw ProtocolError("bus: message posted for round " + std::to_string(msg.t) +
                        " while round " + std::to_string(round_) + " is open");
  if (msg.from_user == msg.to_user) throw ProtocolError("bus: self-addressed price message");
  const std::array<int, 3> key{msg.from_user, msg.to_user, msg.t};
  if (std::find(drops_.begin(), drops_.end(), key) != drops_.end()) return;  // lost in transit
  pending_prices_.push_back(std::move(msg));
}

void SyncBus::post(MuiReport rep) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (rep.t != round_)
    throw ProtocolError("bus: report posted for round " + std::to_string(rep.t) +
                        " while round " + std::to_string(round_) + " is open");
  pending_reports_.push_back(std::move(rep));
}

void SyncBus::inject_drop(int from, int to, int t) {
  std::lock_guard<std::mutex> lock(mutex_);
  drops_.push_back({from, to, t});
}

std::vector<Inbox> SyncBus::deliver_round(int t, const NeighborSets& neighbors) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (t != round_) throw ProtocolError("bus: delivering round " + std::to_string(t) +
                                       " out of order");

  std::vector<Inbox> inboxes(users_);
  RoundLog round_log;
  round_log.t = t;

  for (PriceMessage& msg : pending_prices_) {
    round_log.messages.push_back({msg.from_user, msg.to_user, t, message_bytes(msg), false});
    inboxes[msg.to_user].prices.push_back(std::move(msg));
  }
  for (MuiReport& rep : pending_reports_) {
    round_log.messages.push_back({rep.user, rep.user, t, report_bytes(rep), true});
    inboxes[rep.user].mui = std::move(rep);
  }
  pending_prices_.clear();
  pending_reports_.clear();

  // In-order delivery within the round.
  for (Inbox& inbox : inboxes)
    std::sort(inbox.prices.begin(), inbox.prices.end(),
              [](const PriceMessage& a, const PriceMessage& b) { return a.from_user < b.from_user; });

  // Barrier: every neighbor's message and every local report must be there.
  for (int q = 0; q < users_; ++q) {
    std::size_t expected = 0;
    for (int j = 0; j < users_; ++j) {
      if (j == q) continue;
      const auto& njs = neighbors[j];
      if (std::find(njs.begin(), njs.end(), q) != njs.end()) ++expected;
    }
    if (inboxes[q].prices.size() != expected)
      throw ProtocolError("bus: round " + std::to_string(t) + " barrier failed for user " +
                          std::to_string(q) + " (" + std::to_string(inboxes[q].prices.size()) +
                          "/" + std::to_string(expected) + " price messages)");
    if (inboxes[q].mui.mui.size() == 0)
      throw ProtocolError("bus: round " + std::to_string(t) + " missing MUI report for user " +
                          std::to_string(q));
  }

  log_.push_back(std::move(round_log));
  ++round_;
  return inboxes;
}

std::vector<Inbox> round_exchange(SyncBus& bus, const NetworkState& state,
                                  const LinkCoefficients& coeffs, const LinkState& links, int t,
                                  const NeighborSets& neighbors) {
  const int q_n = links.users;
  for (int j = 0; j < q_n; ++j) {
    // user j measures the harm it suffers and prices every neighbor q
    for (int q : neighbors[j]) {
      const PriceContribution c = price_contribution(q, j, state, coeffs, links);
      bus.post(PriceMessage{j, q, t, c.power, c.phi});
    }
    bus.post(MuiReport{j, t, links.mui.row(j).transpose()});
  }
  return bus.deliver_round(t, neighbors);
}

PriceInputs aggregate_inbox(const Inbox& inbox, int subcarriers, int elements) {
  PriceInputs in;
  in.mui = inbox.mui.mui;
  in.pi_power = ArrayXd::Zero(subcarriers);
  in.pi_phi = MatrixXcd::Zero(subcarriers, elements);
  for (const PriceMessage& msg : inbox.prices) {
    in.pi_power += msg.power_prices;
    in.pi_phi += msg.phi_prices;
  }
  return in;
}

OverheadReport overhead_report(const std::vector<RoundLog>& log) {
  OverheadReport report;
  report.bytes_per_round.reserve(log.size());
  for (const RoundLog& round : log) {
    std::size_t bytes = 0;
    for (const MessageMeta& meta : round.messages)
      if (!meta.local) bytes += meta.bytes;
    report.bytes_per_round.push_back(bytes);
    report.total_bytes += bytes;
  }
  return report;
}

BusPriceSource::BusPriceSource(int users, NeighborSets neighbors, BusFaults faults)
    : bus_(users),
      neighbors_(neighbors.empty() ? all_pairs(users) : std::move(neighbors)),
      faults_(faults),
      last_payloads_(users, std::vector<PriceMessage>(users)) {}

std::vector<PriceInputs> BusPriceSource::collect(const NetworkState& state,
                                                 const LinkCoefficients& coeffs,
                                                 const LinkState& links, int t) {
  const int q_n = links.users;
  const int k_n = static_cast<int>(state[0].power.size());
  const int m_n = static_cast<int>(state[0].phi.cols());

  std::vector<Inbox> inboxes;
  if (faults_.drop_prob <= 0.0) {
    inboxes = round_exchange(bus_, state, coeffs, links, t, neighbors_);
  } else {
    SplitMix64 rng(mix_seed(faults_.seed, static_cast<std::uint64_t>(t)));
    for (int j = 0; j < q_n; ++j) {
      for (int q : neighbors_[j]) {
        const PriceContribution c = price_contribution(q, j, state, coeffs, links);
        PriceMessage msg{j, q, t, c.power, c.phi};
        if (rng.uniform01() < faults_.drop_prob) {
          if (faults_.stale_by_one && last_payloads_[j][q].power_prices.size() > 0) {
            msg.power_prices = last_payloads_[j][q].power_prices;
            msg.phi_prices = last_payloads_[j][q].phi_prices;
          } else {
            msg.power_prices.setZero();
            msg.phi_prices.setZero();
          }
        } else {
          last_payloads_[j][q] = msg;
        }
        bus_.post(std::move(msg));
      }
      bus_.post(MuiReport{j, t, links.mui.row(j).transpose()});
    }
    inboxes = bus_.deliver_round(t, neighbors_);
  }

  std::vector<PriceInputs> inputs(q_n);
  for (int q = 0; q < q_n; ++q) inputs[q] = aggregate_inbox(inboxes[q], k_n, m_n);
  return inputs;
}

}  // namespace rissim
