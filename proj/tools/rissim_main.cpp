#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rissim/channel.hpp"
#include "rissim/config_io.hpp"
#include "rissim/dsca.hpp"
#include "rissim/errors.hpp"
#include "rissim/netbus.hpp"
#include "rissim/sweep.hpp"
#include "rissim/validate.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

json complex_matrix_json(const rissim::MatrixXcd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

json array_json(const rissim::ArrayXd& a) {
  json out = json::array();
  for (int i = 0; i < a.size(); ++i) out.push_back(a[i]);
  return out;
}

int cmd_run(const std::string& config_path, int preset_q,
            const std::vector<std::string>& overrides, const std::string& out_path,
            const std::string& transport, const std::string& dump_channels_path,
            const std::string& log_messages_path, const std::string& history_csv_path) {
  const rissim::ScenarioConfig cfg =
      rissim::resolve_scenario(config_path, preset_q, overrides);
  const rissim::ChannelSet channels = rissim::generate_channels(cfg, cfg.seed);

  if (!dump_channels_path.empty())
    write_file(dump_channels_path, rissim::channels_to_json_text(channels));

  std::unique_ptr<rissim::BusPriceSource> bus;
  if (transport == "bus" && cfg.Q > 1 &&
      cfg.algo.update == rissim::UpdateOrder::jacobi)
    bus = std::make_unique<rissim::BusPriceSource>(cfg.Q);
  const rissim::RunResult run = rissim::run_dsca(cfg, channels, bus.get());

  ordered_json out;
  out["config"] = rissim::scenario_to_json(cfg);
  char hash_buf[24];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(rissim::direct_channel_hash(channels)));
  out["channel_hash"] = hash_buf;
  out["transport"] = bus ? "bus" : "direct";
  out["converged"] = run.converged;
  out["iterations"] = run.iterations;

  ordered_json final_state;
  final_state["sum_rate_bps"] = run.final_sum_rate_bps;
  json rates = json::array();
  if (!run.history.empty())
    for (int q = 0; q < cfg.Q; ++q) rates.push_back(run.history.back().user_rates_bps[q]);
  final_state["user_rates_bps"] = std::move(rates);
  json powers = json::array();
  for (const rissim::UserState& u : run.state) powers.push_back(array_json(u.power));
  final_state["power"] = std::move(powers);
  if (cfg.effective_m() > 0) {
    json phis = json::array(), strengths = json::array(), resonances = json::array(),
         dampings = json::array();
    for (const rissim::UserState& u : run.state) {
      phis.push_back(complex_matrix_json(u.phi));
      strengths.push_back(array_json(u.lorentz.strength));
      resonances.push_back(array_json(u.lorentz.resonance));
      dampings.push_back(array_json(u.lorentz.damping));
    }
    final_state["phi"] = std::move(phis);
    final_state["lorentzian"] = {{"strength", std::move(strengths)},
                                 {"resonance", std::move(resonances)},
                                 {"damping", std::move(dampings)}};
  }
  out["final"] = std::move(final_state);

  json history = json::array();
  for (const rissim::IterationRecord& rec : run.history) {
    json user_rates = json::array();
    for (int q = 0; q < rec.user_rates_bps.size(); ++q)
      user_rates.push_back(rec.user_rates_bps[q]);
    history.push_back({{"t", rec.t},
                       {"alpha", rec.alpha},
                       {"sum_rate_bps", rec.sum_rate_bps},
                       {"term_metric", rec.term_metric},
                       {"user_rates_bps", std::move(user_rates)}});
  }
  out["history"] = std::move(history);

  if (bus) {
    const rissim::OverheadReport overhead = rissim::overhead_report(bus->bus().log());
    out["overhead"] = {{"total_bytes", overhead.total_bytes},
                       {"rounds", overhead.bytes_per_round.size()},
                       {"bytes_per_round",
                        overhead.bytes_per_round.empty() ? 0 : overhead.bytes_per_round[0]}};
    if (!log_messages_path.empty()) {
      std::string lines;
      for (const rissim::RoundLog& round : bus->bus().log())
        for (const rissim::MessageMeta& meta : round.messages) {
          ordered_json line = {{"t", meta.t},
                               {"from", meta.from},
                               {"to", meta.to},
                               {"bytes", meta.bytes},
                               {"local", meta.local}};
          lines += line.dump() + "\n";
        }
      write_file(log_messages_path, lines);
    }
  }

  if (!history_csv_path.empty()) write_file(history_csv_path, history_to_csv(run.history));

  const std::string text = out.dump(2) + "\n";
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

int cmd_sweep(const std::string& config_path, int preset_q,
              const std::vector<std::string>& overrides, const std::string& out_path,
              std::vector<double> powers, int realizations, int jobs,
              const std::vector<std::string>& variant_names, bool paper_scale) {
  rissim::ScenarioConfig base = rissim::resolve_scenario(config_path, preset_q, overrides);

  rissim::SweepSpec spec;
  spec.jobs = jobs;
  if (!powers.empty()) spec.power_grid_dbm = std::move(powers);
  if (realizations > 0) spec.num_realizations = realizations;
  if (!variant_names.empty()) {
    spec.variants.clear();
    for (const std::string& name : variant_names) {
      // format: <Q>:<ris|noris>
      const auto colon = name.find(':');
      if (colon == std::string::npos)
        throw rissim::ConfigError("--variants: expected <Q>:<ris|noris>, got " + name);
      const int users = std::stoi(name.substr(0, colon));
      const std::string kind = name.substr(colon + 1);
      if (kind != "ris" && kind != "noris")
        throw rissim::ConfigError("--variants: expected <Q>:<ris|noris>, got " + name);
      spec.variants.push_back({users, kind == "ris"});
    }
  }

  if (paper_scale) {
    base.M = 50;
    spec.num_realizations = realizations > 0 ? realizations : 100;
  } else if (config_path.empty()) {
    base.M = 8;  // desk-scale default keeps the sweep fast
  }

  const rissim::SweepResult result = rissim::run_sweep(base, spec);
  write_file(out_path, rissim::sweep_csv(result));
  write_file(out_path + ".summary.csv", rissim::summary_csv(result));

  int failures = 0;
  for (const rissim::SweepRow& row : result.rows)
    if (!row.error.empty()) ++failures;
  std::cerr << "sweep: " << result.rows.size() << " rows (" << failures << " failed) -> "
            << out_path << "\n";
  return 0;
}

int cmd_validate(bool quick, int grid_points, const std::string& out_path) {
  std::vector<rissim::validate::SuiteResult> results;
  rissim::validate::GradientSuiteOptions gopts;
  if (quick) gopts.instances = 5;
  results.push_back(rissim::validate::gradient_suite(gopts));
  results.push_back(rissim::validate::waterfilling_suite(quick ? 10 : 50));
  results.push_back(
      rissim::validate::pdd_grid_suite(quick ? 3 : 10, quick ? 41 : grid_points));
  results.push_back(rissim::validate::bus_equivalence_suite());

  const std::string report = rissim::validate::report_json(results);
  if (out_path.empty() || out_path == "-")
    std::cout << report;
  else
    write_file(out_path, report);

  bool all = true;
  for (const auto& r : results) {
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << " (max error " << r.max_error
              << ", tol " << r.tolerance << ", " << r.detail << ")\n";
    all = all && r.pass;
  }
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-cell RIS-assisted OFDM network simulator and distributed optimizer"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int preset_q = 2;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (overrides the preset)");
    sub->add_option("--preset-q", preset_q, "preset user count when no config is given")
        ->check(CLI::IsMember({2, 3}));
    sub->add_option("--set", overrides, "field override, e.g. --set system.M=0");
  };

  CLI::App* run = app.add_subcommand("run", "single scenario, full iteration history");
  add_common(run);
  std::string transport = "bus";
  std::string dump_channels_path, log_messages_path, history_csv_path;
  run->add_option("--out", out_path, "output JSON path (default: stdout)");
  run->add_option("--transport", transport, "price exchange: bus or direct")
      ->check(CLI::IsMember({"bus", "direct"}));
  run->add_option("--dump-channels", dump_channels_path, "write the channel set as JSON");
  run->add_option("--log-messages", log_messages_path,
                  "write per-round message metadata as JSON lines (bus transport)");
  run->add_option("--history-csv", history_csv_path, "write the iteration history as CSV");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over transmit power");
  add_common(sweep);
  std::vector<double> powers;
  std::vector<std::string> variant_names;
  int realizations = 0, jobs = 1;
  bool paper_scale = false;
  std::string sweep_out = "sweep.csv";
  sweep->add_option("--out", sweep_out, "output CSV path (summary lands beside it)");
  sweep->add_option("--powers", powers, "transmit power grid in dBm (sorted)");
  sweep->add_option("--realizations", realizations, "Monte Carlo realizations per cell");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--variants", variant_names, "variants as <Q>:<ris|noris>");
  sweep->add_flag("--paper-scale", paper_scale, "M=50 surfaces, 100 realizations");

  CLI::App* validate = app.add_subcommand("validate", "run the oracle suites");
  bool quick = false;
  int grid_points = 200;
  validate->add_flag("--quick", quick, "smaller instance counts, coarse grid");
  validate->add_option("--grid-n", grid_points, "grid points per axis for the surface oracle");
  validate->add_option("--out", out_path, "report JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(config_path, preset_q, overrides, out_path, transport,
                     dump_channels_path, log_messages_path, history_csv_path);
    if (sweep->parsed())
      return cmd_sweep(config_path, preset_q, overrides, sweep_out, powers, realizations, jobs,
                       variant_names, paper_scale);
    if (validate->parsed()) return cmd_validate(quick, grid_points, out_path);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? 0 : 1;
  } catch (const rissim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
