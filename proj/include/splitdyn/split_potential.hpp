#ifndef SPLITDYN_SPLIT_POTENTIAL_HPP
#define SPLITDYN_SPLIT_POTENTIAL_HPP

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include "types.hpp"

namespace splitdyn {

using RadialFn = std::function<double(double)>;

/// Curvature split V = convex + concave used by the one-sided update rule.
/// Validity: d2v of the convex part is nonnegative, of the concave part
/// nonpositive, over the working domain.
struct CurvatureSplitPart {
  RadialFn v;
  RadialFn dv;
  RadialFn d2v;
};

/// Fourth-order split V = hyperconvex + hyperconcave used by the
/// endpoint-corrected update rules.  Validity: d4v of the hyperconvex part is
/// nonnegative, of the hyperconcave part nonpositive.
struct FourthOrderSplitPart {
  RadialFn v;
  RadialFn dv;
  RadialFn d3v;
  RadialFn d4v;
};

/// A radial pair potential V(d) together with its derivative ladder and the
/// two sign-structured splits the dissipative update rules rely on.  All
/// callbacks take the scalar separation d > domain_min.
struct SplitPotential {
  RadialFn v;
  RadialFn dv;
  RadialFn d2v;
  RadialFn d3v;  // optional unless a third-derivative rescue is requested
  RadialFn d4v;  // optional; used only by that rescue's tangent

  CurvatureSplitPart convex_part;
  CurvatureSplitPart concave_part;
  FourthOrderSplitPart superconvex_part;
  FourthOrderSplitPart superconcave_part;

  /// Optional closed form for (V(d1) - V(d0)) / (d1 - d0) that stays finite
  /// as d1 -> d0 (e.g. -mu/d -> mu/(d0*d1)).  When present it replaces the
  /// raw difference quotient and no rescue is ever needed.
  std::function<double(double, double)> stable_quotient;
  /// d/d(d1) of stable_quotient; required alongside it for the tangent.
  std::function<double(double, double)> stable_quotient_dd1;

  /// Separations at or below this are treated as a collision and rejected.
  double domain_min = 1e-12;
};

/// Rejects separations outside the admissible domain instead of evaluating a
/// potential where its derivative ladder blows up.
inline void check_separation(const SplitPotential& pot, double d) {
  if (!(d > pot.domain_min))
    throw singular_configuration("pair separation " + std::to_string(d) +
                                 " at or below domain_min " + std::to_string(pot.domain_min));
}

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail

/// Spot-checks the derivative ladder and both splits on log-uniform samples
/// of [lo, hi]: parts must sum to the total and carry the advertised
/// curvature signs.  Throws std::invalid_argument on the first violation.
inline void validate_split(const SplitPotential& pot, double lo, double hi, int samples = 256) {
  detail::require(pot.v && pot.dv && pot.d2v, "potential must define v, dv, d2v");
  detail::require(lo > pot.domain_min && hi > lo, "validation interval must sit above domain_min");
  const bool curvature = static_cast<bool>(pot.convex_part.v);
  const bool fourth = static_cast<bool>(pot.superconvex_part.v);
  if (curvature)
    detail::require(pot.convex_part.dv && pot.convex_part.d2v && pot.concave_part.v &&
                        pot.concave_part.dv && pot.concave_part.d2v,
                    "curvature split must define v, dv, d2v for both parts");
  if (fourth)
    detail::require(pot.superconvex_part.dv && pot.superconvex_part.d3v &&
                        pot.superconcave_part.v && pot.superconcave_part.dv &&
                        pot.superconcave_part.d3v,
                    "fourth-order split must define v, dv, d3v for both parts");

  std::mt19937 rng(0x5eedu);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int i = 0; i < samples; ++i) {
    const double s = (i == 0) ? lo : (i == 1) ? hi : std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    const double tol = 1e-9 * (1.0 + std::fabs(pot.v(s)) + std::fabs(pot.dv(s)));
    if (curvature) {
      detail::require(std::fabs(pot.convex_part.v(s) + pot.concave_part.v(s) - pot.v(s)) <= tol,
                      "curvature split parts do not sum to the potential");
      detail::require(std::fabs(pot.convex_part.dv(s) + pot.concave_part.dv(s) - pot.dv(s)) <= tol,
                      "curvature split slopes do not sum to the slope");
      detail::require(pot.convex_part.d2v(s) >= -tol, "convex part has negative curvature");
      detail::require(pot.concave_part.d2v(s) <= tol, "concave part has positive curvature");
    }
    if (fourth) {
      detail::require(
          std::fabs(pot.superconvex_part.v(s) + pot.superconcave_part.v(s) - pot.v(s)) <= tol,
          "fourth-order split parts do not sum to the potential");
      detail::require(
          std::fabs(pot.superconvex_part.dv(s) + pot.superconcave_part.dv(s) - pot.dv(s)) <= tol,
          "fourth-order split slopes do not sum to the slope");
      if (pot.superconvex_part.d4v)
        detail::require(pot.superconvex_part.d4v(s) >= -tol,
                        "hyperconvex part has negative fourth derivative");
      if (pot.superconcave_part.d4v)
        detail::require(pot.superconcave_part.d4v(s) <= tol,
                        "hyperconcave part has positive fourth derivative");
    }
  }
}

}  // namespace splitdyn

#endif
