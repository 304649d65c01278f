#include "rissim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "rissim/channel.hpp"
#include "rissim/dsca.hpp"
#include "rissim/errors.hpp"
#include "rissim/rng.hpp"

namespace rissim {

namespace {

ScenarioConfig variant_config(const ScenarioConfig& base, const SweepVariant& variant,
                              double p_dbm) {
  ScenarioConfig cfg = base;
  if (variant.users != base.Q) {
    // Geometry tracks the preset for the variant's user count; everything
    // else (K, L, M, algo, seed) stays with the base config.
    const ScenarioConfig preset = default_scenario(variant.users);
    cfg.Q = preset.Q;
    cfg.bs = preset.bs;
    cfg.ris = preset.ris;
    cfg.ue = preset.ue;
  }
  cfg.ris_enabled = variant.ris && cfg.M > 0;
  cfg.P_q = dbm_to_watts(p_dbm);
  return cfg;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec) {
  if (spec.power_grid_dbm.empty()) throw ConfigError("sweep.powers: grid must be non-empty");
  if (!std::is_sorted(spec.power_grid_dbm.begin(), spec.power_grid_dbm.end()))
    throw ConfigError("sweep.powers: grid must be sorted");
  if (spec.num_realizations < 1) throw ConfigError("sweep.realizations: must be >= 1");
  if (spec.variants.empty()) throw ConfigError("sweep.variants: must be non-empty");

  SweepResult result;
  const std::size_t cells =
      spec.variants.size() * spec.power_grid_dbm.size() * spec.num_realizations;
  result.rows.resize(cells);

  auto run_cell = [&](std::size_t index) {
    const std::size_t per_variant = spec.power_grid_dbm.size() * spec.num_realizations;
    const SweepVariant& variant = spec.variants[index / per_variant];
    const std::size_t rem = index % per_variant;
    const double p_dbm = spec.power_grid_dbm[rem / spec.num_realizations];
    const int realization = static_cast<int>(rem % spec.num_realizations);

    SweepRow& row = result.rows[index];
    row.variant = variant;
    row.p_dbm = p_dbm;
    row.realization = realization;
    try {
      const ScenarioConfig cfg = variant_config(base, variant, p_dbm);
      const std::uint64_t seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(realization));
      const ChannelSet channels = generate_channels(cfg, seed);
      row.channel_hash = direct_channel_hash(channels);
      const RunResult run = run_dsca(cfg, channels);
      row.sum_rate_bps = run.final_sum_rate_bps;
      row.iterations = run.iterations;
      row.converged = run.converged;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  if (spec.jobs <= 1) {
    for (std::size_t i = 0; i < cells; ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int workers =
        static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), cells));
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells; i = next.fetch_add(1)) run_cell(i);
      });
    for (std::thread& t : pool) t.join();
  }

  // Per-(variant, P) mean and standard error over the successful rows.
  for (std::size_t v = 0; v < spec.variants.size(); ++v)
    for (std::size_t p = 0; p < spec.power_grid_dbm.size(); ++p) {
      SweepSummaryRow srow;
      srow.variant = spec.variants[v];
      srow.p_dbm = spec.power_grid_dbm[p];
      double sum = 0.0, sumsq = 0.0;
      int n = 0;
      for (int r = 0; r < spec.num_realizations; ++r) {
        const std::size_t index =
            (v * spec.power_grid_dbm.size() + p) * spec.num_realizations + r;
        const SweepRow& row = result.rows[index];
        if (!row.error.empty()) continue;
        sum += row.sum_rate_bps;
        sumsq += row.sum_rate_bps * row.sum_rate_bps;
        ++n;
      }
      srow.realizations = n;
      if (n > 0) srow.mean_sum_rate_bps = sum / n;
      if (n > 1) {
        const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
        srow.stderr_sum_rate_bps = std::sqrt(var / n);
      }
      result.summary.push_back(std::move(srow));
    }

  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "variant,Q,ris,P_dbm,realization,sum_rate_bps,iters,converged,channel_hash,error\n";
  char hash_buf[24];
  for (const SweepRow& row : result.rows) {
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(row.channel_hash));
    out += row.variant.label();
    out += ',' + std::to_string(row.variant.users);
    out += ',' + std::to_string(row.variant.ris ? 1 : 0);
    out += ',' + format_double(row.p_dbm);
    out += ',' + std::to_string(row.realization);
    out += ',' + (row.error.empty() ? format_double(row.sum_rate_bps) : std::string());
    out += ',' + std::to_string(row.iterations);
    out += ',' + std::to_string(row.converged ? 1 : 0);
    out += ',';
    out += hash_buf;
    out += ',' + row.error;
    out += '\n';
  }
  return out;
}

std::string summary_csv(const SweepResult& result) {
  std::string out =
      "variant,Q,ris,P_dbm,mean_sum_rate_bps,stderr_sum_rate_bps,realizations\n";
  for (const SweepSummaryRow& row : result.summary) {
    out += row.variant.label();
    out += ',' + std::to_string(row.variant.users);
    out += ',' + std::to_string(row.variant.ris ? 1 : 0);
    out += ',' + format_double(row.p_dbm);
    out += ',' + format_double(row.mean_sum_rate_bps);
    out += ',' + format_double(row.stderr_sum_rate_bps);
    out += ',' + std::to_string(row.realizations);
    out += '\n';
  }
  return out;
}

}  // namespace rissim
