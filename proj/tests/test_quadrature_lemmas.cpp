#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <splitdyn/force_law.hpp>
#include <splitdyn/potentials.hpp>

#include "test_support.hpp"

using namespace splitdyn;

// The dissipative rules owe their energy behavior to one scalar inequality:
// for a step moving a separation from a to b, the work mismatch
//
//   r = Lambda(a, b) * (b - a) - (v(b) - v(a))
//
// is exactly zero for the secant rule and non-negative for the
// convex/concave and fourth-derivative splits, regardless of ordering.
// These checks hammer that inequality with random intervals.

namespace {

struct Range {
  SplitPotential pot;
  double lo;
  double hi;
};

void check_work_mismatch(const Range& range) {
  const SplitPotential& pot = range.pot;
  for (int i = 0; i < 1000; ++i) {
    const double a = testsupport::uniform(range.lo, range.hi);
    const double b = testsupport::uniform(range.lo, range.hi);
    const double dd = b - a;
    const double dv_exact = pot.v(b) - pot.v(a);
    const double scale = 1.0 + std::fabs(dv_exact);

    const double lam_lg = (pot.v(b) - pot.v(a)) / (std::fabs(dd) > 0 ? dd : 1.0);
    if (std::fabs(dd) > 1e-6) {
      const double r_lg = lam_lg * dd - dv_exact;
      CHECK(std::fabs(r_lg) <= 1e-9 * scale);
    }

    const double lam_ge = lambda_generalized_eyre(pot, a, b).lambda;
    CHECK(lam_ge * dd - dv_exact >= -1e-9 * (scale + std::fabs(lam_ge * dd)));

    const double lam_pm = lambda_perturbed_midpoint(pot, a, b).lambda;
    CHECK(lam_pm * dd - dv_exact >= -1e-9 * (scale + std::fabs(lam_pm * dd)));

    const double lam_pt = lambda_perturbed_trapezoidal(pot, a, b).lambda;
    CHECK(lam_pt * dd - dv_exact >= -1e-9 * (scale + std::fabs(lam_pt * dd)));
  }
}

}  // namespace

TEST_CASE("work mismatch signs for the stiff spring") {
  check_work_mismatch({neo_hookean({1000.0, 4.0}), 0.5, 12.0});
}

TEST_CASE("work mismatch signs for the pair well") {
  check_work_mismatch({lennard_jones({100.0, 1.0}), 0.85, 3.0});
}

TEST_CASE("work mismatch signs for the inverse-distance attraction") {
  check_work_mismatch({gravitational(2.95912208286e-4), 0.2, 30.0});
}

TEST_CASE("secant rule work matches the potential difference exactly") {
  // This is the discrete energy identity behind exact conservation: the
  // secant slope times the displacement telescopes to the change in v.
  const SplitPotential nh = neo_hookean({1000.0, 4.0});
  for (int i = 0; i < 1000; ++i) {
    const double a = testsupport::uniform(0.5, 12.0);
    const double b = testsupport::uniform(0.5, 12.0);
    if (std::fabs(b - a) < 1e-6) continue;
    const ForceEval lg =
        lambda_labudde_greenspan(nh, a, b, 0.0, RescueKind::JanzMidpoint);
    const double dv = nh.v(b) - nh.v(a);
    CHECK(lg.lambda * (b - a) == Catch::Approx(dv).margin(1e-9 * (1.0 + std::fabs(dv))));
  }
}
