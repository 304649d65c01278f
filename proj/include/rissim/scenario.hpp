#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rissim/types.hpp"

namespace rissim {

// Penalty dual decomposition knobs for the per-user surface subproblem.
struct PddParams {
  double rho0 = 1.0;       // initial penalty parameter
  double c = 0.8;          // penalty shrink factor, 0 < c < 1
  int inner_iters = 4;     // alternations per outer step
  int outer_iters = 25;
  double viol_tol = 3e-4;  // target ||phi - d||_inf at exit
};

// Box constraints for the Lorentzian element parameters.
struct LorentzBounds {
  double strength_min = 1e-6;
  double strength_max = 1.0;
  double resonance_min = 1e-6;
  double resonance_max = M_PI;
  double damping_max = 100.0;  // |kappa| <= damping_max
};

enum class UpdateOrder { jacobi, gauss_seidel };

struct AlgoParams {
  double tau = 0.1;          // proximal weight, > 0
  double alpha0 = 0.9;       // initial step size, in (0, 1]
  double theta = 1e-2;       // step decay: a <- a*(1 - theta*a); 0 keeps a fixed
  double eps_term = 1e-3;    // termination threshold
  int max_iter = 500;
  double bisect_tol = 1e-12; // relative budget residual for water-filling
  UpdateOrder update = UpdateOrder::jacobi;
  PddParams pdd;
  LorentzBounds lorentz;
};

// Full experiment configuration. Immutable once built; powers are stored in
// watts, dBm appears only at the config and reporting boundaries.
struct ScenarioConfig {
  int Q = 2;   // user (BS-RIS-UE triplet) count
  int K = 16;  // subcarriers
  int M = 50;  // elements per surface; 0 encodes the no-RIS baseline
  int L = 4;   // channel taps, 1 <= L <= K

  double P_q = 0.1;        // per-BS power budget, watts
  double sigma_sq = 1e-11; // per-UE noise power, watts

  std::vector<Vec2> bs, ris, ue;  // 2-D node positions, meters

  double alpha_direct = 4.0;  // pathloss exponent, BS-UE links
  double alpha_ris = 2.0;     // pathloss exponent, RIS-adjacent segments
  double pl0_db = -30.0;      // pathloss at reference distance
  double d0 = 1.0;            // reference distance, meters

  bool ris_enabled = true;
  std::uint64_t seed = 1;
  AlgoParams algo;

  int effective_m() const { return ris_enabled ? M : 0; }

  // Throws ConfigError naming the offending field path.
  void validate() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Amplitude-domain factor sqrt(PL0 * (d/d0)^-alpha): received power then
// scales with the linear pathloss. Throws GeometryError on coincident nodes.
double pathloss_amplitude(const Vec2& a, const Vec2& b, double exponent, double pl0_db,
                          double d0);

// Two- or three-pair reference layout. Throws ConfigError for other Q.
ScenarioConfig default_scenario(int q);

}  // namespace rissim
