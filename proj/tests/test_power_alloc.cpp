#include <doctest.h>

#include <limits>

#include "rissim/errors.hpp"
#include "rissim/oracle.hpp"
#include "rissim/power_alloc.hpp"
#include "rissim/rng.hpp"

using namespace rissim;

namespace {

PowerSubproblem random_subproblem(std::uint64_t seed, int k_n) {
  SplitMix64 rng(seed);
  PowerSubproblem sub;
  sub.gain = ArrayXd(k_n);
  sub.mui = ArrayXd(k_n);
  sub.p_prev = ArrayXd(k_n);
  sub.prices = ArrayXd(k_n);
  for (int k = 0; k < k_n; ++k) {
    sub.gain[k] = 2.0 * rng.uniform01();
    sub.mui[k] = 0.5 + 1.5 * rng.uniform01();
    sub.p_prev[k] = rng.uniform01();
    sub.prices[k] = -rng.uniform01();
  }
  sub.tau = 0.05 + 0.95 * rng.uniform01();
  sub.budget = 0.5 + 3.5 * rng.uniform01();
  return sub;
}

}  // namespace

TEST_SUITE_BEGIN("power_alloc");

TEST_CASE("classic water filling limit") {
  PowerSubproblem sub;
  sub.gain = ArrayXd(2);
  sub.gain << 1.0, 0.25;
  sub.mui = ArrayXd::Constant(2, 1.0);
  sub.p_prev = ArrayXd::Zero(2);
  sub.prices = ArrayXd::Zero(2);
  sub.tau = 1e-8;
  sub.budget = 3.0;

  const PowerSolution sol = solve_power(sub, 1e-12);
  CHECK(sol.p[0] == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(sol.p[1] == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(sol.mu == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("dead channels follow the proximal center") {
  PowerSubproblem sub;
  sub.gain = ArrayXd::Zero(3);
  sub.mui = ArrayXd::Constant(3, 1.0);
  sub.p_prev = ArrayXd(3);
  sub.p_prev << 0.2, 0.5, 0.1;
  sub.prices = ArrayXd::Zero(3);
  sub.tau = 0.7;
  sub.budget = 10.0;  // ample: mu = 0

  const PowerSolution sol = solve_power(sub, 1e-12);
  CHECK((sol.p - sub.p_prev).abs().maxCoeff() < 1e-12);
  CHECK(sol.mu == 0.0);
}

TEST_CASE("symmetric inputs give a uniform allocation") {
  PowerSubproblem sub;
  sub.gain = ArrayXd::Constant(4, 1.3);
  sub.mui = ArrayXd::Constant(4, 0.8);
  sub.p_prev = ArrayXd::Constant(4, 0.25);
  sub.prices = ArrayXd::Constant(4, -0.2);
  sub.tau = 0.4;
  sub.budget = 1.0;

  const PowerSolution sol = solve_power(sub, 1e-12);
  for (int k = 1; k < 4; ++k) CHECK(sol.p[k] == doctest::Approx(sol.p[0]).epsilon(1e-10));
  CHECK(sol.p.sum() <= sub.budget * (1 + 1e-12));
}

TEST_CASE("matches the projected gradient oracle") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const PowerSubproblem sub = random_subproblem(1000 + seed, 8);
    const PowerSolution sol = solve_power(sub, 1e-12);
    const oracle::PgResult pg = oracle::projected_gradient_power(sub, 1e-12, 2000000);
    CHECK((sol.p - pg.p).abs().maxCoeff() <= 1e-6 * sub.budget);
  }
}

TEST_CASE("feasibility and complementary slackness") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const PowerSubproblem sub = random_subproblem(2000 + seed, 6);
    const PowerSolution sol = solve_power(sub, 1e-12);
    CHECK((sol.p >= 0.0).all());
    CHECK(sol.p.sum() <= sub.budget * (1.0 + 1e-10));
    if (sol.mu > 1e-12)
      CHECK(std::abs(sol.p.sum() - sub.budget) <= 1e-10 * sub.budget);
  }
}

TEST_CASE("improves on the projected proximal center") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PowerSubproblem sub = random_subproblem(3000 + seed, 5);
    const PowerSolution sol = solve_power(sub, 1e-12);
    const ArrayXd reference = oracle::project_power_feasible(sub.p_prev, sub.budget);
    CHECK(power_objective(sub, sol.p) >= power_objective(sub, reference) - 1e-12);
  }
}

TEST_CASE("output follows a subcarrier permutation") {
  const PowerSubproblem sub = random_subproblem(4000, 6);
  PowerSubproblem perm = sub;
  std::vector<int> order = {3, 0, 5, 1, 4, 2};
  for (int k = 0; k < 6; ++k) {
    perm.gain[k] = sub.gain[order[k]];
    perm.mui[k] = sub.mui[order[k]];
    perm.p_prev[k] = sub.p_prev[order[k]];
    perm.prices[k] = sub.prices[order[k]];
  }
  const ArrayXd a = solve_power(sub, 1e-12).p;
  const ArrayXd b = solve_power(perm, 1e-12).p;
  for (int k = 0; k < 6; ++k) CHECK(b[k] == doctest::Approx(a[order[k]]).epsilon(1e-9));
}

TEST_CASE("solution map is continuous") {
  const PowerSubproblem sub = random_subproblem(5000, 5);
  const ArrayXd base = solve_power(sub, 1e-12).p;
  SplitMix64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    PowerSubproblem nudged = sub;
    const double delta = 1e-6;
    for (int k = 0; k < 5; ++k) {
      nudged.gain[k] += delta * (rng.uniform01() - 0.5);
      nudged.prices[k] += delta * (rng.uniform01() - 0.5);
    }
    const ArrayXd moved = solve_power(nudged, 1e-12).p;
    CHECK((moved - base).abs().maxCoeff() < 100 * delta);
  }
}

TEST_CASE("rejects non-finite and inconsistent inputs") {
  PowerSubproblem sub = random_subproblem(6000, 3);
  sub.gain[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_power(sub, 1e-12), std::invalid_argument);

  PowerSubproblem bad = random_subproblem(6001, 3);
  bad.mui = ArrayXd::Zero(3);
  CHECK_THROWS_AS(solve_power(bad, 1e-12), std::invalid_argument);

  PowerSubproblem mismatched = random_subproblem(6002, 3);
  mismatched.prices = ArrayXd::Zero(4);
  CHECK_THROWS_AS(solve_power(mismatched, 1e-12), std::invalid_argument);
}

TEST_SUITE_END();
