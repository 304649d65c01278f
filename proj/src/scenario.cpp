#include "rissim/scenario.hpp"

#include <fstream>
#include <sstream>

#include "rissim/config_io.hpp"
#include "rissim/errors.hpp"

namespace rissim {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double pathloss_amplitude(const Vec2& a, const Vec2& b, double exponent, double pl0_db,
                          double d0) {
  const double d = (a - b).norm();
  if (d <= 0.0) throw GeometryError("pathloss: coincident node positions");
  if (exponent <= 0.0) throw std::invalid_argument("pathloss: exponent must be > 0");
  const double pl0 = std::pow(10.0, pl0_db / 10.0);
  return std::sqrt(pl0 * std::pow(d / d0, -exponent));
}

void ScenarioConfig::validate() const {
  if (Q < 1) throw ConfigError("system.Q: must be >= 1");
  if (K < 1) throw ConfigError("system.K: must be >= 1");
  if (M < 0) throw ConfigError("system.M: must be >= 0");
  if (L < 1) throw ConfigError("system.L: must be >= 1");
  if (L > K) throw ConfigError("system.L: must be <= K");
  if (!(P_q > 0.0)) throw ConfigError("system.P_dbm: budget must be positive");
  if (!(sigma_sq > 0.0)) throw ConfigError("system.noise_dbm: noise power must be positive");
  if (static_cast<int>(bs.size()) != Q) throw ConfigError("geometry.bs: expected Q positions");
  if (static_cast<int>(ris.size()) != Q) throw ConfigError("geometry.ris: expected Q positions");
  if (static_cast<int>(ue.size()) != Q) throw ConfigError("geometry.ue: expected Q positions");
  if (!(alpha_direct > 0.0)) throw ConfigError("geometry.alpha_direct: must be > 0");
  if (!(alpha_ris > 0.0)) throw ConfigError("geometry.alpha_ris: must be > 0");
  if (!(d0 > 0.0)) throw ConfigError("geometry.d0: must be > 0");

  // Every link that appears in the model needs a strictly positive distance.
  for (int j = 0; j < Q; ++j) {
    for (int q = 0; q < Q; ++q) {
      if ((bs[j] - ue[q]).norm() <= 0.0)
        throw ConfigError("geometry: coincident BS" + std::to_string(j + 1) + "/UE" +
                          std::to_string(q + 1));
      if ((ris[j] - ue[q]).norm() <= 0.0)
        throw ConfigError("geometry: coincident RIS" + std::to_string(j + 1) + "/UE" +
                          std::to_string(q + 1));
    }
    if ((bs[j] - ris[j]).norm() <= 0.0)
      throw ConfigError("geometry: coincident BS" + std::to_string(j + 1) + "/RIS" +
                        std::to_string(j + 1));
  }

  if (!(algo.tau > 0.0)) throw ConfigError("algo.tau: must be > 0");
  if (!(algo.alpha0 > 0.0 && algo.alpha0 <= 1.0)) throw ConfigError("algo.alpha0: must be in (0,1]");
  if (algo.theta < 0.0) throw ConfigError("algo.theta: must be >= 0");
  if (!(algo.eps_term > 0.0)) throw ConfigError("algo.eps_term: must be > 0");
  if (algo.max_iter < 1) throw ConfigError("algo.max_iter: must be >= 1");
  if (!(algo.bisect_tol > 0.0)) throw ConfigError("algo.bisect_tol: must be > 0");
  if (!(algo.pdd.rho0 > 0.0)) throw ConfigError("algo.pdd.rho0: must be > 0");
  if (!(algo.pdd.c > 0.0 && algo.pdd.c < 1.0)) throw ConfigError("algo.pdd.c: must be in (0,1)");
  if (algo.pdd.inner_iters < 1) throw ConfigError("algo.pdd.inner_iters: must be >= 1");
  if (algo.pdd.outer_iters < 1) throw ConfigError("algo.pdd.outer_iters: must be >= 1");
  if (!(algo.pdd.viol_tol > 0.0)) throw ConfigError("algo.pdd.viol_tol: must be > 0");
  const LorentzBounds& lb = algo.lorentz;
  if (!(lb.strength_min > 0.0 && lb.strength_min <= lb.strength_max))
    throw ConfigError("algo.lorentz.strength_min: must satisfy 0 < min <= max");
  if (!(lb.resonance_min > 0.0 && lb.resonance_min <= lb.resonance_max))
    throw ConfigError("algo.lorentz.resonance_min: must satisfy 0 < min <= max");
  if (!(lb.damping_max > 0.0)) throw ConfigError("algo.lorentz.damping_max: must be > 0");
}

ScenarioConfig default_scenario(int q) {
  if (q != 2 && q != 3) throw ConfigError("preset: only Q in {2,3} is available");

  const double d = 20.0;
  ScenarioConfig cfg;
  cfg.Q = q;
  cfg.K = 16;
  cfg.M = 50;
  cfg.L = 4;
  cfg.P_q = dbm_to_watts(20.0);
  cfg.sigma_sq = dbm_to_watts(-80.0);
  cfg.pl0_db = -30.0;
  cfg.d0 = 1.0;
  cfg.alpha_direct = 4.0;
  cfg.alpha_ris = 2.0;

  cfg.bs = {Vec2(0.0, 0.0), Vec2(2 * d, 0.0)};
  cfg.ris = {Vec2(-d / 4, d / 8), Vec2(9 * d / 4, d / 8)};
  cfg.ue = {Vec2(d / 2, 3 * d / 2), Vec2(3 * d / 2, 3 * d / 2)};
  if (q == 3) {
    cfg.bs.push_back(Vec2(0.0, 4 * d));
    cfg.ris.push_back(Vec2(-d / 4, 9 * d / 4));
    cfg.ue.push_back(Vec2(d / 2, 5 * d / 2));
  }
  return cfg;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError(path + "." + it.key() + ": unknown field");
  }
}

template <typename T>
void read_field(const json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

std::vector<Vec2> read_positions(const json& arr, const std::string& path) {
  std::vector<Vec2> out;
  if (!arr.is_array()) throw ConfigError(path + ": expected an array of [x,y] pairs");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& p = arr[i];
    if (!p.is_array() || p.size() != 2)
      throw ConfigError(path + "[" + std::to_string(i) + "]: expected [x,y]");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

json positions_to_json(const std::vector<Vec2>& v) {
  json arr = json::array();
  for (const Vec2& p : v) arr.push_back({p.x(), p.y()});
  return arr;
}

}  // namespace

ordered_json scenario_to_json(const ScenarioConfig& cfg) {
  ordered_json j;
  j["system"] = {{"Q", cfg.Q},
                 {"K", cfg.K},
                 {"M", cfg.M},
                 {"L", cfg.L},
                 {"P_dbm", watts_to_dbm(cfg.P_q)},
                 {"noise_dbm", watts_to_dbm(cfg.sigma_sq)},
                 {"ris_enabled", cfg.ris_enabled}};
  j["geometry"] = {{"bs", positions_to_json(cfg.bs)},
                   {"ris", positions_to_json(cfg.ris)},
                   {"ue", positions_to_json(cfg.ue)},
                   {"alpha_direct", cfg.alpha_direct},
                   {"alpha_ris", cfg.alpha_ris},
                   {"PL0_db", cfg.pl0_db},
                   {"d0", cfg.d0}};
  j["algo"] = {{"tau", cfg.algo.tau},
               {"alpha0", cfg.algo.alpha0},
               {"theta", cfg.algo.theta},
               {"eps_term", cfg.algo.eps_term},
               {"max_iter", cfg.algo.max_iter},
               {"bisect_tol", cfg.algo.bisect_tol},
               {"update", cfg.algo.update == UpdateOrder::jacobi ? "jacobi" : "gauss_seidel"},
               {"pdd",
                {{"rho0", cfg.algo.pdd.rho0},
                 {"c", cfg.algo.pdd.c},
                 {"inner_iters", cfg.algo.pdd.inner_iters},
                 {"outer_iters", cfg.algo.pdd.outer_iters},
                 {"viol_tol", cfg.algo.pdd.viol_tol}}},
               {"lorentz",
                {{"strength_min", cfg.algo.lorentz.strength_min},
                 {"strength_max", cfg.algo.lorentz.strength_max},
                 {"resonance_min", cfg.algo.lorentz.resonance_min},
                 {"resonance_max", cfg.algo.lorentz.resonance_max},
                 {"damping_max", cfg.algo.lorentz.damping_max}}}};
  j["seed"] = cfg.seed;
  return j;
}

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(j, "config", {"system", "geometry", "algo", "seed"});

  ScenarioConfig cfg = default_scenario(2);

  if (j.contains("system")) {
    const json& s = j.at("system");
    reject_unknown(s, "system", {"Q", "K", "M", "L", "P_dbm", "noise_dbm", "ris_enabled"});
    read_field(s, "system", "Q", cfg.Q);
    read_field(s, "system", "K", cfg.K);
    read_field(s, "system", "M", cfg.M);
    read_field(s, "system", "L", cfg.L);
    double p_dbm = watts_to_dbm(cfg.P_q);
    double n_dbm = watts_to_dbm(cfg.sigma_sq);
    read_field(s, "system", "P_dbm", p_dbm);
    read_field(s, "system", "noise_dbm", n_dbm);
    cfg.P_q = dbm_to_watts(p_dbm);
    cfg.sigma_sq = dbm_to_watts(n_dbm);
    read_field(s, "system", "ris_enabled", cfg.ris_enabled);
  }
  if (cfg.M == 0) cfg.ris_enabled = false;

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    reject_unknown(g, "geometry",
                   {"bs", "ris", "ue", "alpha_direct", "alpha_ris", "PL0_db", "d0"});
    if (g.contains("bs")) cfg.bs = read_positions(g.at("bs"), "geometry.bs");
    if (g.contains("ris")) cfg.ris = read_positions(g.at("ris"), "geometry.ris");
    if (g.contains("ue")) cfg.ue = read_positions(g.at("ue"), "geometry.ue");
    read_field(g, "geometry", "alpha_direct", cfg.alpha_direct);
    read_field(g, "geometry", "alpha_ris", cfg.alpha_ris);
    read_field(g, "geometry", "PL0_db", cfg.pl0_db);
    read_field(g, "geometry", "d0", cfg.d0);
  } else if (j.contains("system")) {
    // Geometry defaults follow the preset for the requested user count.
    const ScenarioConfig preset = default_scenario(cfg.Q);
    cfg.bs = preset.bs;
    cfg.ris = preset.ris;
    cfg.ue = preset.ue;
  }

  if (j.contains("algo")) {
    const json& a = j.at("algo");
    reject_unknown(a, "algo",
                   {"tau", "alpha0", "theta", "eps_term", "max_iter", "bisect_tol", "update",
                    "pdd", "lorentz"});
    read_field(a, "algo", "tau", cfg.algo.tau);
    read_field(a, "algo", "alpha0", cfg.algo.alpha0);
    read_field(a, "algo", "theta", cfg.algo.theta);
    read_field(a, "algo", "eps_term", cfg.algo.eps_term);
    read_field(a, "algo", "max_iter", cfg.algo.max_iter);
    read_field(a, "algo", "bisect_tol", cfg.algo.bisect_tol);
    if (a.contains("update")) {
      const std::string u = a.at("update").get<std::string>();
      if (u == "jacobi")
        cfg.algo.update = UpdateOrder::jacobi;
      else if (u == "gauss_seidel")
        cfg.algo.update = UpdateOrder::gauss_seidel;
      else
        throw ConfigError("algo.update: expected \"jacobi\" or \"gauss_seidel\"");
    }
    if (a.contains("pdd")) {
      const json& p = a.at("pdd");
      reject_unknown(p, "algo.pdd", {"rho0", "c", "inner_iters", "outer_iters", "viol_tol"});
      read_field(p, "algo.pdd", "rho0", cfg.algo.pdd.rho0);
      read_field(p, "algo.pdd", "c", cfg.algo.pdd.c);
      read_field(p, "algo.pdd", "inner_iters", cfg.algo.pdd.inner_iters);
      read_field(p, "algo.pdd", "outer_iters", cfg.algo.pdd.outer_iters);
      read_field(p, "algo.pdd", "viol_tol", cfg.algo.pdd.viol_tol);
    }
    if (a.contains("lorentz")) {
      const json& l = a.at("lorentz");
      reject_unknown(l, "algo.lorentz",
                     {"strength_min", "strength_max", "resonance_min", "resonance_max",
                      "damping_max"});
      read_field(l, "algo.lorentz", "strength_min", cfg.algo.lorentz.strength_min);
      read_field(l, "algo.lorentz", "strength_max", cfg.algo.lorentz.strength_max);
      read_field(l, "algo.lorentz", "resonance_min", cfg.algo.lorentz.resonance_min);
      read_field(l, "algo.lorentz", "resonance_max", cfg.algo.lorentz.resonance_max);
      read_field(l, "algo.lorentz", "damping_max", cfg.algo.lorentz.damping_max);
    }
  }

  read_field(j, "config", "seed", cfg.seed);

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + " is not valid JSON (" + e.what() + ")");
  }
  return scenario_from_json(j);
}

void apply_override(ordered_json& j, const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set: expected key.path=value, got \"" + key_eq_value + "\"");
  std::string key = key_eq_value.substr(0, eq);
  const std::string value = key_eq_value.substr(eq + 1);

  std::string pointer = "/";
  for (char ch : key) pointer += (ch == '.') ? '/' : ch;

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // bare strings are allowed unquoted
  }
  try {
    j[json::json_pointer(pointer)] = parsed;
  } catch (const json::exception&) {
    throw ConfigError("--set: cannot set " + key);
  }
}

ScenarioConfig resolve_scenario(const std::string& config_path, int preset_q,
                                const std::vector<std::string>& overrides) {
  ordered_json j;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("config: cannot open " + config_path);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("config: " + config_path + " is not valid JSON (" + e.what() + ")");
    }
  } else {
    j = scenario_to_json(default_scenario(preset_q));
  }
  for (const std::string& kv : overrides) apply_override(j, kv);
  return scenario_from_json(j);
}

}  // namespace rissim
