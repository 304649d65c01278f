#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rissim/types.hpp"

namespace rissim::validate {

struct SuiteResult {
  std::string name;
  bool pass = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct GradientSuiteOptions {
  int instances = 20;
  std::uint64_t seed = 0x5eed0001;
  int users = 2, subcarriers = 4, elements = 3;
  double rel_tol = 1e-5;
  bool mutate_price_sign = false;  // test hook: flips the analytic prices
};

// Analytic power prices and profile gradients against central finite
// differences on seeded random instances.
SuiteResult gradient_suite(const GradientSuiteOptions& opts = {});

// Closed-form water filling against a projected-gradient solve of the same
// subproblem, plus feasibility and complementary slackness.
SuiteResult waterfilling_suite(int instances = 50, int subcarriers = 8,
                               std::uint64_t seed = 0x5eed0002);

// Penalty-decomposition surface subproblem against an exhaustive parameter
// grid at small scale (K = 2, M = 1).
SuiteResult pdd_grid_suite(int instances = 10, int grid_points = 200,
                           std::uint64_t seed = 0x5eed0003);

// Message-bus aggregates against the in-process gradient path (exact match).
SuiteResult bus_equivalence_suite(std::uint64_t seed = 0x5eed0004);

// quick = smaller instance counts and a coarser grid; for smoke runs.
std::vector<SuiteResult> run_all(bool quick = false);

std::string report_json(const std::vector<SuiteResult>& results);

}  // namespace rissim::validate
