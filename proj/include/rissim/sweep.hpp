#pragma once

#include <string>
#include <vector>

#include "rissim/scenario.hpp"

namespace rissim {

struct SweepVariant {
  int users = 2;
  bool ris = true;
  std::string label() const {
    return "Q" + std::to_string(users) + (ris ? "-ris" : "-noris");
  }
};

struct SweepSpec {
  std::vector<double> power_grid_dbm = {0, 5, 10, 15, 20, 25, 30};
  int num_realizations = 20;
  std::vector<SweepVariant> variants = {{2, true}, {2, false}, {3, true}, {3, false}};
  int jobs = 1;
};

struct SweepRow {
  SweepVariant variant;
  double p_dbm = 0.0;
  int realization = 0;
  double sum_rate_bps = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t channel_hash = 0;
  std::string error;  // empty on success; failures keep the sweep going
};

struct SweepSummaryRow {
  SweepVariant variant;
  double p_dbm = 0.0;
  double mean_sum_rate_bps = 0.0;
  double stderr_sum_rate_bps = 0.0;
  int realizations = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;        // fixed order: variant, P, realization
  std::vector<SweepSummaryRow> summary;
};

// Monte Carlo sweep over transmit power. Channel seeds are paired: the same
// (variant user count, realization) uses identical draws at every grid power
// and with RIS on or off, so per-seed comparisons are meaningful. Rows are
// computed in parallel (jobs > 1) but emitted in a fixed order, so output is
// byte-identical for any job count.
SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec);

std::string sweep_csv(const SweepResult& result);
std::string summary_csv(const SweepResult& result);

}  // namespace rissim
