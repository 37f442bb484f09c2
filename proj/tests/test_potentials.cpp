#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>

#include <splitdyn/potentials.hpp>

#include "test_support.hpp"

using namespace splitdyn;

namespace {

// Checks the whole derivative ladder of `pot` against finite differences and
// the slope against quadrature of dv, on random points of [lo, hi].
void check_ladder(const SplitPotential& pot, double lo, double hi) {
  for (int i = 0; i < 32; ++i) {
    const double r = testsupport::uniform(lo, hi);
    const double scale = 1.0 + std::fabs(pot.dv(r));
    CHECK(std::fabs(pot.dv(r) - testsupport::fd_derivative(pot.v, r, 1e-3 * r)) < 1e-6 * scale);
    CHECK(std::fabs(pot.d2v(r) - testsupport::fd_derivative(pot.dv, r, 1e-3 * r)) <
          1e-6 * (1.0 + std::fabs(pot.d2v(r))));
    CHECK(std::fabs(pot.d3v(r) - testsupport::fd_derivative(pot.d2v, r, 1e-3 * r)) <
          1e-6 * (1.0 + std::fabs(pot.d3v(r))));
    CHECK(std::fabs(pot.d4v(r) - testsupport::fd_derivative(pot.d3v, r, 1e-3 * r)) <
          2e-6 * (1.0 + std::fabs(pot.d4v(r))));
  }
  // independent route: integrating dv must recover the potential difference
  const double a = lo + 0.1 * (hi - lo);
  const double b = hi - 0.2 * (hi - lo);
  const double quad = testsupport::integrate(pot.dv, a, b, 1e-13 * (1.0 + std::fabs(pot.v(b))));
  CHECK(std::fabs(quad - (pot.v(b) - pot.v(a))) < 1e-9 * (1.0 + std::fabs(pot.v(b))));
}

}  // namespace

TEST_CASE("neo-hookean tether: frozen values and ladder") {
  const SplitPotential pot = neo_hookean({1000.0, 4.0});

  // r = 2.5 gives exact decimal values, though 2*rbar/r = 3.2 itself rounds
  CHECK(pot.v(2.5) == Catch::Approx(1575.0).epsilon(1e-14));
  CHECK(pot.dv(2.5) == Catch::Approx(-2580.0).epsilon(1e-15));
  CHECK(pot.d2v(2.5) == Catch::Approx(3064.0).epsilon(1e-15));
  CHECK(pot.d3v(2.5) == Catch::Approx(-3276.8).epsilon(1e-15));
  CHECK(pot.d4v(2.5) == Catch::Approx(5242.88).epsilon(1e-15));

  CHECK(pot.v(std::sqrt(6.0)) == Catch::Approx(1709.2968632290776).epsilon(1e-14));
  CHECK(pot.dv(std::sqrt(6.0)) == Catch::Approx(-2739.0589746278297).epsilon(1e-14));

  // equilibrium at the rest length, stiff on both sides
  CHECK(pot.dv(4.0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(pot.d2v(4.0) > 0.0);

  check_ladder(pot, 0.8, 10.0);

  // fully convex: both splits are total + zero
  CHECK(pot.concave_part.v(2.0) == 0.0);
  CHECK(pot.superconcave_part.d3v(2.0) == 0.0);
  CHECK(pot.convex_part.v(2.0) == pot.v(2.0));
  CHECK(pot.superconvex_part.d3v(2.0) == pot.d3v(2.0));

  CHECK_THROWS_AS(neo_hookean({-1.0, 4.0}), std::invalid_argument);
  CHECK_THROWS_AS(neo_hookean({1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("lennard-jones: frozen values, ladder, and split signs") {
  const SplitPotential pot = lennard_jones({100.0, 1.0});

  const double rmin = std::pow(2.0, 1.0 / 6.0);
  CHECK(pot.v(rmin) == Catch::Approx(-100.0).epsilon(1e-14));
  CHECK(pot.dv(rmin) == Catch::Approx(0.0).margin(1e-10));
  CHECK(pot.v(1.2) == Catch::Approx(-89.096528758307599).epsilon(1e-14));

  check_ladder(pot, 0.85, 3.0);

  for (int i = 0; i < 64; ++i) {
    const double r = testsupport::uniform(0.7, 4.0);
    // parts sum to the total on every rung they share
    CHECK(pot.convex_part.v(r) + pot.concave_part.v(r) == Catch::Approx(pot.v(r)).epsilon(1e-13));
    CHECK(pot.superconvex_part.d3v(r) + pot.superconcave_part.d3v(r) ==
          Catch::Approx(pot.d3v(r)).epsilon(1e-13));
    // advertised curvature signs
    CHECK(pot.convex_part.d2v(r) > 0.0);
    CHECK(pot.concave_part.d2v(r) < 0.0);
    CHECK(pot.superconvex_part.d4v(r) > 0.0);
    CHECK(pot.superconcave_part.d4v(r) < 0.0);
  }

  CHECK_THROWS_AS(lennard_jones({0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("gravity: ladder, concavity, and the closed-form quotient") {
  const double mu = 2.95912208286e-4;
  const SplitPotential pot = gravitational(mu);

  CHECK(pot.v(1.0) == Catch::Approx(-mu).epsilon(1e-15));
  CHECK(pot.dv(2.0) == Catch::Approx(mu / 4.0).epsilon(1e-15));
  check_ladder(pot, 0.3, 30.0);

  CHECK(pot.convex_part.v(1.0) == 0.0);
  CHECK(pot.concave_part.d2v(1.5) < 0.0);
  CHECK(pot.superconcave_part.d4v(1.5) < 0.0);

  REQUIRE(pot.stable_quotient);
  REQUIRE(pot.stable_quotient_dd1);
  CHECK(pot.stable_quotient(0.9, 1.3) == Catch::Approx(0.00025291641733846153).epsilon(1e-15));
  for (int i = 0; i < 64; ++i) {
    const double d0 = testsupport::uniform(0.5, 20.0);
    const double d1 = testsupport::uniform(0.5, 20.0);
    if (std::fabs(d1 - d0) < 1e-3) continue;
    const double raw = (pot.v(d1) - pot.v(d0)) / (d1 - d0);
    CHECK(pot.stable_quotient(d0, d1) == Catch::Approx(raw).epsilon(1e-10));
    CHECK(pot.stable_quotient_dd1(d0, d1) ==
          Catch::Approx(testsupport::fd_derivative(
                            [&](double x) { return pot.stable_quotient(d0, x); }, d1, 1e-4 * d1))
              .epsilon(1e-8));
  }

  CHECK_THROWS_AS(gravitational(0.0), std::invalid_argument);
}

TEST_CASE("split validation rejects a mislabeled split") {
  // claim the attractive branch is the convex part: curvature check must fire
  SplitPotential bad = lennard_jones({1.0, 1.0});
  std::swap(bad.convex_part, bad.concave_part);
  CHECK_THROWS_AS(validate_split(bad, 0.8, 3.0), std::invalid_argument);

  // parts that do not sum to the total
  SplitPotential mismatched = lennard_jones({1.0, 1.0});
  mismatched.convex_part.v = [](double) { return 0.0; };
  CHECK_THROWS_AS(validate_split(mismatched, 0.8, 3.0), std::invalid_argument);
}

TEST_CASE("separation guard") {
  const SplitPotential pot = lennard_jones({1.0, 1.0});
  CHECK_THROWS_AS(check_separation(pot, 0.0), singular_configuration);
  CHECK_THROWS_AS(check_separation(pot, 1e-13), singular_configuration);
  CHECK_NOTHROW(check_separation(pot, 0.5));
}
