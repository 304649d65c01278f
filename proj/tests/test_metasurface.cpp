#include <doctest.h>

#include "rissim/errors.hpp"
#include "rissim/metasurface.hpp"
#include "rissim/rng.hpp"

using namespace rissim;

TEST_SUITE_BEGIN("metasurface");

TEST_CASE("omega grid") {
  const ArrayXd g16 = omega_grid(16);
  CHECK(g16[0] == doctest::Approx(M_PI / 16).epsilon(1e-15));
  CHECK(g16[15] == doctest::Approx(M_PI).epsilon(1e-15));

  const ArrayXd g1 = omega_grid(1);
  CHECK(g1.size() == 1);
  CHECK(g1[0] == doctest::Approx(M_PI));

  for (int k = 1; k <= 32; k *= 2) {
    const ArrayXd g = omega_grid(k);
    for (int i = 1; i < k; ++i) CHECK(g[i] > g[i - 1]);
    CHECK(g[0] > 0.0);
  }
}

TEST_CASE("response at resonance") {
  // at omega = omega0 the response is -j*F*omega/kappa
  const Complex phi = lorentzian_point(0.5, 1.0, 0.1, 1.0);
  CHECK(phi.real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(phi.imag() == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("response vanishes at low frequency") {
  CHECK(std::abs(lorentzian_point(1.0, 2.0, 1.0, 1e-7)) < 1e-12);
}

TEST_CASE("response by direct evaluation") {
  // 1 / (3 + 100j)
  const Complex phi = lorentzian_point(1.0, 2.0, 100.0, 1.0);
  CHECK(phi.real() == doctest::Approx(2.997e-4).epsilon(1e-3));
  CHECK(phi.imag() == doctest::Approx(-9.991e-3).epsilon(1e-3));
}

TEST_CASE("singular denominator throws") {
  CHECK_THROWS_AS(lorentzian_point(0.5, 1.0, 0.0, 1.0), SingularityError);
  // unchecked variant passes non-finite values through
  LorentzianParams p{ArrayXd::Constant(1, 0.5), ArrayXd::Constant(1, 1.0),
                     ArrayXd::Constant(1, 0.0)};
  ArrayXd grid(1);
  grid << 1.0;
  const ReflectionProfile phi = lorentzian_response_unchecked(p, grid);
  CHECK_FALSE(std::isfinite(std::abs(phi(0, 0))));
}

TEST_CASE("unit disk projection") {
  CHECK(project_unit_disk(Complex(0.5, 0.0)) == Complex(0.5, 0.0));
  CHECK(std::abs(project_unit_disk(Complex(3.0, 4.0)) - Complex(0.6, 0.8)) < 1e-15);
  CHECK(std::abs(project_unit_disk(Complex(-2.0, 0.0)) - Complex(-1.0, 0.0)) < 1e-15);
  CHECK(project_unit_disk(Complex(0.0, 0.0)) == Complex(0.0, 0.0));
}

TEST_CASE("projection is idempotent and nonexpansive") {
  SplitMix64 rng(3);
  for (int i = 0; i < 300; ++i) {
    double a, b, c, d;
    rng.normal_pair(a, b);
    rng.normal_pair(c, d);
    const Complex y1(2.0 * a, 2.0 * b), y2(2.0 * c, 2.0 * d);
    const Complex p1 = project_unit_disk(y1), p2 = project_unit_disk(y2);
    CHECK(std::abs(project_unit_disk(p1) - p1) < 1e-15);
    CHECK(std::abs(p1 - p2) <= std::abs(y1 - y2) + 1e-12);
  }
}

TEST_CASE("analytic jacobian matches finite differences") {
  SplitMix64 rng(17);
  const ArrayXd grid = omega_grid(8);
  for (int trial = 0; trial < 30; ++trial) {
    const double f = 0.1 + 0.85 * rng.uniform01();
    const double w0 = 0.3 + 2.5 * rng.uniform01();
    const double kap = (rng.uniform01() - 0.5) * 8.0 + 0.5;  // keep away from 0
    if (std::abs(kap) < 0.05) continue;

    const MatrixXcd jac = lorentzian_jacobian(f, w0, kap, grid);
    const double h = 1e-6;
    auto eval = [&grid](double ff, double ww, double kk) {
      LorentzianParams p{ArrayXd::Constant(1, ff), ArrayXd::Constant(1, ww),
                         ArrayXd::Constant(1, kk)};
      return lorentzian_response(p, grid).col(0).eval();
    };
    const VectorXcd dF = (eval(f + h, w0, kap) - eval(f - h, w0, kap)) / (2 * h);
    const VectorXcd dW = (eval(f, w0 + h * w0, kap) - eval(f, w0 - h * w0, kap)) / (2 * h * w0);
    const VectorXcd dK =
        (eval(f, w0, kap + h * std::abs(kap)) - eval(f, w0, kap - h * std::abs(kap))) /
        (2 * h * std::abs(kap));

    auto rel = [](const VectorXcd& got, const VectorXcd& want) {
      return (got - want).cwiseAbs().maxCoeff() /
             std::max(want.cwiseAbs().maxCoeff(), 1e-12);
    };
    CHECK(rel(jac.col(0), dF) <= 1e-6);
    CHECK(rel(jac.col(1), dW) <= 1e-6);
    CHECK(rel(jac.col(2), dK) <= 1e-6);
  }
}

TEST_CASE("modulus peaks near the resonance for small damping") {
  const ArrayXd grid = omega_grid(64);
  LorentzianParams p{ArrayXd::Constant(1, 0.9), ArrayXd::Constant(1, grid[31]),
                     ArrayXd::Constant(1, 0.02)};
  const ReflectionProfile phi = lorentzian_response(p, grid);
  int peak = 0;
  for (int k = 1; k < 64; ++k)
    if (std::abs(phi(k, 0)) > std::abs(phi(peak, 0))) peak = k;
  CHECK(std::abs(grid[peak] - p.resonance[0]) <= grid[1] - grid[0]);
  // modulus grows towards the peak and decays after it
  for (int k = 1; k <= peak; ++k) CHECK(std::abs(phi(k, 0)) >= std::abs(phi(k - 1, 0)) - 1e-12);
  for (int k = peak + 1; k < 64; ++k) CHECK(std::abs(phi(k, 0)) <= std::abs(phi(k - 1, 0)) + 1e-12);
}

TEST_CASE("unit modulus enforcement rescales strength") {
  const ArrayXd grid = omega_grid(16);
  const LorentzBounds bounds;
  LorentzianParams p{ArrayXd::Constant(1, 1.0), ArrayXd::Constant(1, grid[7]),
                     ArrayXd::Constant(1, 0.05)};
  const double peak_before =
      lorentzian_response(p, grid).cwiseAbs().maxCoeff();
  REQUIRE(peak_before > 1.0);
  const LorentzianParams clamped = enforce_unit_modulus(p, grid, bounds);
  const double peak_after = lorentzian_response(clamped, grid).cwiseAbs().maxCoeff();
  CHECK(peak_after <= 1.0 + 1e-12);
  CHECK(peak_after == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(clamped.strength[0] < p.strength[0]);
}

TEST_CASE("spread initialization is feasible") {
  const ArrayXd grid = omega_grid(16);
  const LorentzBounds bounds;
  for (int m : {1, 3, 8, 50}) {
    const LorentzianParams p = spread_params(m, grid, bounds);
    CHECK(p.elements() == m);
    CHECK((p.strength >= bounds.strength_min).all());
    CHECK((p.strength <= bounds.strength_max).all());
    CHECK((p.resonance > 0.0).all());
    CHECK((p.resonance <= bounds.resonance_max).all());
    CHECK(lorentzian_response(p, grid).cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
  }
}

TEST_SUITE_END();
