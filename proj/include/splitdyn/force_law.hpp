#ifndef SPLITDYN_FORCE_LAW_HPP
#define SPLITDYN_FORCE_LAW_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "split_potential.hpp"
#include "types.hpp"

namespace splitdyn {

/// The five one-step update rules.  MidPoint evaluates the slope at the
/// midpoint separation; the other four are secant-slope (quotient) rules that
/// differ in how they approximate (V(d1) - V(d0)) / (d1 - d0).
enum class IntegratorKind {
  MidPoint,
  LaBuddeGreenspan,
  GeneralizedEyre,
  PerturbedMidPoint,
  PerturbedTrapezoidal,
};

/// Replacement formula used by LaBuddeGreenspan when the raw difference
/// quotient becomes numerically meaningless (|d1 - d0| below tol_q).
enum class RescueKind {
  JanzMidpoint,             // V'((d0+d1)/2); keeps the scheme second order
  GonzalezThirdDerivative,  // adds (d1-d0)^2/24 V'''((d0+d1)/2)
  GeneralizedEyre,
  PerturbedMidPoint,
  PerturbedTrapezoidal,
};

[[nodiscard]] inline const char* to_string(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::MidPoint: return "mid-point";
    case IntegratorKind::LaBuddeGreenspan: return "labudde-greenspan";
    case IntegratorKind::GeneralizedEyre: return "generalized-eyre";
    case IntegratorKind::PerturbedMidPoint: return "perturbed-midpoint";
    case IntegratorKind::PerturbedTrapezoidal: return "perturbed-trapezoidal";
  }
  return "?";
}

[[nodiscard]] inline const char* to_string(RescueKind rescue) {
  switch (rescue) {
    case RescueKind::JanzMidpoint: return "janz-midpoint";
    case RescueKind::GonzalezThirdDerivative: return "gonzalez-third-derivative";
    case RescueKind::GeneralizedEyre: return "generalized-eyre";
    case RescueKind::PerturbedMidPoint: return "perturbed-midpoint";
    case RescueKind::PerturbedTrapezoidal: return "perturbed-trapezoidal";
  }
  return "?";
}

/// Scalar force factor Lambda approximating the secant slope of V between the
/// endpoint separations, plus its derivative with respect to the new
/// separation d1 (for MidPoint: with respect to the midpoint separation).
struct ForceEval {
  double lambda = 0.0;
  double dlambda = 0.0;
  bool switched = false;  // true when a quotient rescue produced the value
};

namespace detail {

inline void require_slot(const RadialFn& fn, const char* what) {
  if (!fn) throw std::invalid_argument(std::string("potential is missing ") + what);
}

}  // namespace detail

/// Lambda = V'(d_mid) evaluated at the separation of the averaged
/// configuration.  dlambda is taken with respect to d_mid.
[[nodiscard]] inline ForceEval lambda_midpoint(const SplitPotential& pot, double d_mid) {
  return {pot.dv(d_mid), pot.d2v(d_mid), false};
}

/// One-sided rule: convex slope at the new separation, concave slope at the
/// old.  Dissipates energy unconditionally for a valid curvature split.
[[nodiscard]] inline ForceEval lambda_generalized_eyre(const SplitPotential& pot, double d0,
                                                       double d1) {
  detail::require_slot(pot.convex_part.dv, "the curvature split (convex_part.dv)");
  detail::require_slot(pot.concave_part.dv, "the curvature split (concave_part.dv)");
  return {pot.convex_part.dv(d1) + pot.concave_part.dv(d0), pot.convex_part.d2v(d1), false};
}

/// Midpoint slope with sign-safe third-derivative endpoint correction:
///   Lambda = V'(h) + (d1-d0)^2/24 [ Vp'''(d1) + Vm'''(d0) ],  h = (d0+d1)/2,
/// where Vp/Vm are the hyperconvex/hyperconcave parts.
[[nodiscard]] inline ForceEval lambda_perturbed_midpoint(const SplitPotential& pot, double d0,
                                                         double d1) {
  detail::require_slot(pot.superconvex_part.d3v, "the fourth-order split (superconvex_part.d3v)");
  detail::require_slot(pot.superconcave_part.d3v, "the fourth-order split (superconcave_part.d3v)");
  const double h = 0.5 * (d0 + d1);
  const double dd = d1 - d0;
  const double third = pot.superconvex_part.d3v(d1) + pot.superconcave_part.d3v(d0);
  const double fourth = pot.superconvex_part.d4v ? pot.superconvex_part.d4v(d1) : 0.0;
  return {pot.dv(h) + dd * dd / 24.0 * third,
          0.5 * pot.d2v(h) + dd / 12.0 * third + dd * dd / 24.0 * fourth, false};
}

/// Trapezoidal slope with the opposite-sign endpoint correction:
///   Lambda = (V'(d0)+V'(d1))/2 - (d1-d0)^2/12 [ Vp'''(d0) + Vm'''(d1) ].
[[nodiscard]] inline ForceEval lambda_perturbed_trapezoidal(const SplitPotential& pot, double d0,
                                                            double d1) {
  detail::require_slot(pot.superconvex_part.d3v, "the fourth-order split (superconvex_part.d3v)");
  detail::require_slot(pot.superconcave_part.d3v, "the fourth-order split (superconcave_part.d3v)");
  const double dd = d1 - d0;
  const double third = pot.superconvex_part.d3v(d0) + pot.superconcave_part.d3v(d1);
  const double fourth = pot.superconcave_part.d4v ? pot.superconcave_part.d4v(d1) : 0.0;
  return {0.5 * (pot.dv(d0) + pot.dv(d1)) - dd * dd / 12.0 * third,
          0.5 * pot.d2v(d1) - dd / 6.0 * third - dd * dd / 12.0 * fourth, false};
}

/// Formula substituted for the raw difference quotient near d1 == d0.
[[nodiscard]] inline ForceEval rescue_lambda(const SplitPotential& pot, double d0, double d1,
                                             RescueKind rescue) {
  switch (rescue) {
    case RescueKind::JanzMidpoint: {
      const double h = 0.5 * (d0 + d1);
      return {pot.dv(h), 0.5 * pot.d2v(h), true};
    }
    case RescueKind::GonzalezThirdDerivative: {
      detail::require_slot(pot.d3v, "d3v (required by the third-derivative rescue)");
      const double h = 0.5 * (d0 + d1);
      const double dd = d1 - d0;
      const double fourth = pot.d4v ? pot.d4v(h) : 0.0;
      return {pot.dv(h) + dd * dd / 24.0 * pot.d3v(h),
              0.5 * pot.d2v(h) + dd / 12.0 * pot.d3v(h) + dd * dd / 48.0 * fourth, true};
    }
    case RescueKind::GeneralizedEyre: {
      ForceEval eval = lambda_generalized_eyre(pot, d0, d1);
      eval.switched = true;
      return eval;
    }
    case RescueKind::PerturbedMidPoint: {
      ForceEval eval = lambda_perturbed_midpoint(pot, d0, d1);
      eval.switched = true;
      return eval;
    }
    case RescueKind::PerturbedTrapezoidal: {
      ForceEval eval = lambda_perturbed_trapezoidal(pot, d0, d1);
      eval.switched = true;
      return eval;
    }
  }
  throw std::logic_error("unknown rescue kind");
}

/// The exact secant slope (V(d1) - V(d0)) / (d1 - d0), which conserves energy
/// identically.  Three regimes:
///  - a closed-form stable quotient on the potential, when present and
///    allowed, is immune to cancellation and needs no rescue;
///  - |d1 - d0| > tol_q: the raw difference quotient;
///  - otherwise the requested rescue formula (reported via `switched`).
[[nodiscard]] inline ForceEval lambda_labudde_greenspan(const SplitPotential& pot, double d0,
                                                        double d1, double tol_q,
                                                        RescueKind rescue,
                                                        bool prefer_stable_quotient = true) {
  if (prefer_stable_quotient && pot.stable_quotient) {
    if (!pot.stable_quotient_dd1)
      throw std::invalid_argument("potential defines stable_quotient without stable_quotient_dd1");
    return {pot.stable_quotient(d0, d1), pot.stable_quotient_dd1(d0, d1), false};
  }
  const double dd = d1 - d0;
  if (std::fabs(dd) <= tol_q) return rescue_lambda(pot, d0, d1, rescue);
  const double lambda = (pot.v(d1) - pot.v(d0)) / dd;
  return {lambda, (pot.dv(d1) - lambda) / dd, false};
}

/// Dispatch on the update rule.  d_mid is the separation of the averaged
/// configuration and is consulted only by MidPoint.
[[nodiscard]] inline ForceEval force_lambda(IntegratorKind kind, const SplitPotential& pot,
                                            double d0, double d1, double d_mid, double tol_q,
                                            RescueKind rescue,
                                            bool prefer_stable_quotient = true) {
  switch (kind) {
    case IntegratorKind::MidPoint: return lambda_midpoint(pot, d_mid);
    case IntegratorKind::LaBuddeGreenspan:
      return lambda_labudde_greenspan(pot, d0, d1, tol_q, rescue, prefer_stable_quotient);
    case IntegratorKind::GeneralizedEyre: return lambda_generalized_eyre(pot, d0, d1);
    case IntegratorKind::PerturbedMidPoint: return lambda_perturbed_midpoint(pot, d0, d1);
    case IntegratorKind::PerturbedTrapezoidal: return lambda_perturbed_trapezoidal(pot, d0, d1);
  }
  throw std::logic_error("unknown integrator kind");
}

}  // namespace splitdyn

#endif
