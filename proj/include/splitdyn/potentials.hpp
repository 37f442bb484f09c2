#ifndef SPLITDYN_POTENTIALS_HPP
#define SPLITDYN_POTENTIALS_HPP

#include <stdexcept>

#include "split_potential.hpp"

namespace splitdyn {

namespace detail {

[[nodiscard]] inline RadialFn zero_fn() {
  return [](double) { return 0.0; };
}

[[nodiscard]] inline CurvatureSplitPart zero_curvature_part() {
  return {zero_fn(), zero_fn(), zero_fn()};
}

[[nodiscard]] inline FourthOrderSplitPart zero_fourth_part() {
  return {zero_fn(), zero_fn(), zero_fn(), zero_fn()};
}

}  // namespace detail

/// Radial incompressible neo-Hookean tether
///   V(r) = (c/6) r^2 + (c/3) rest^3 / r - (c/2) rest^2,
/// stiff for large c, with equilibrium at r = rest.  Convex and
/// fourth-order-positive everywhere on r > 0, so both splits are trivial.
struct NeoHookeanParams {
  double stiffness = 1.0;  // c
  double rest = 1.0;       // unstretched length
};

[[nodiscard]] inline SplitPotential neo_hookean(const NeoHookeanParams& params,
                                                bool validate = true) {
  if (!(params.stiffness > 0.0) || !(params.rest > 0.0))
    throw std::invalid_argument("neo_hookean: stiffness and rest length must be positive");
  const double c = params.stiffness;
  const double r3 = params.rest * params.rest * params.rest;
  const double offset = 0.5 * c * params.rest * params.rest;

  SplitPotential pot;
  pot.v = [c, r3, offset](double r) { return c / 6.0 * r * r + c / 3.0 * r3 / r - offset; };
  pot.dv = [c, r3](double r) { return c / 3.0 * r - c / 3.0 * r3 / (r * r); };
  pot.d2v = [c, r3](double r) { return c / 3.0 + 2.0 * c / 3.0 * r3 / (r * r * r); };
  pot.d3v = [c, r3](double r) { return -2.0 * c * r3 / (r * r * r * r); };
  pot.d4v = [c, r3](double r) { return 8.0 * c * r3 / (r * r * r * r * r); };

  pot.convex_part = {pot.v, pot.dv, pot.d2v};
  pot.concave_part = detail::zero_curvature_part();
  pot.superconvex_part = {pot.v, pot.dv, pot.d3v, pot.d4v};
  pot.superconcave_part = detail::zero_fourth_part();

  if (validate) validate_split(pot, 0.1 * params.rest, 10.0 * params.rest);
  return pot;
}

/// Lennard-Jones 12-6 pair potential
///   V(r) = 4 eps [ (sigma/r)^12 - (sigma/r)^6 ].
/// The repulsive r^-12 branch is convex with positive fourth derivative; the
/// attractive -r^-6 branch is concave with negative fourth derivative, so it
/// doubles as the canonical nontrivial split for both rule families.
struct LennardJonesParams {
  double epsilon = 1.0;
  double sigma = 1.0;
};

[[nodiscard]] inline SplitPotential lennard_jones(const LennardJonesParams& params,
                                                  bool validate = true) {
  if (!(params.epsilon > 0.0) || !(params.sigma > 0.0))
    throw std::invalid_argument("lennard_jones: epsilon and sigma must be positive");
  const double eps = params.epsilon;
  const double s6 = [&] {
    const double s2 = params.sigma * params.sigma;
    return s2 * s2 * s2;
  }();
  const double s12 = s6 * s6;

  // Derivative ladders of a r^-n: each step multiplies by -n/r.
  const auto rep = [eps, s12](double r, int order) {
    double value = 4.0 * eps * s12;
    double n = 12.0;
    for (int k = 0; k < order; ++k, n += 1.0) value *= -n;
    double rn = 1.0;
    for (int k = 0; k < 12 + order; ++k) rn *= r;
    return value / rn;
  };
  const auto att = [eps, s6](double r, int order) {
    double value = -4.0 * eps * s6;
    double n = 6.0;
    for (int k = 0; k < order; ++k, n += 1.0) value *= -n;
    double rn = 1.0;
    for (int k = 0; k < 6 + order; ++k) rn *= r;
    return value / rn;
  };

  SplitPotential pot;
  pot.v = [rep, att](double r) { return rep(r, 0) + att(r, 0); };
  pot.dv = [rep, att](double r) { return rep(r, 1) + att(r, 1); };
  pot.d2v = [rep, att](double r) { return rep(r, 2) + att(r, 2); };
  pot.d3v = [rep, att](double r) { return rep(r, 3) + att(r, 3); };
  pot.d4v = [rep, att](double r) { return rep(r, 4) + att(r, 4); };

  pot.convex_part = {[rep](double r) { return rep(r, 0); }, [rep](double r) { return rep(r, 1); },
                     [rep](double r) { return rep(r, 2); }};
  pot.concave_part = {[att](double r) { return att(r, 0); }, [att](double r) { return att(r, 1); },
                      [att](double r) { return att(r, 2); }};
  pot.superconvex_part = {[rep](double r) { return rep(r, 0); },
                          [rep](double r) { return rep(r, 1); },
                          [rep](double r) { return rep(r, 3); },
                          [rep](double r) { return rep(r, 4); }};
  pot.superconcave_part = {[att](double r) { return att(r, 0); },
                           [att](double r) { return att(r, 1); },
                           [att](double r) { return att(r, 3); },
                           [att](double r) { return att(r, 4); }};

  if (validate) validate_split(pot, 0.5 * params.sigma, 5.0 * params.sigma);
  return pot;
}

/// Newtonian attraction V(r) = -mu / r with mu = G m_A m_B.  Entirely concave
/// with negative fourth derivative, so both splits put the whole potential in
/// the concave / hyperconcave part.  The secant slope has the exact closed
/// form (V(d1) - V(d0)) / (d1 - d0) = mu / (d0 d1), which is supplied as the
/// stable quotient so the difference never suffers cancellation.
[[nodiscard]] inline SplitPotential gravitational(double mu, bool validate = true) {
  if (!(mu > 0.0)) throw std::invalid_argument("gravitational: mu must be positive");

  SplitPotential pot;
  pot.v = [mu](double r) { return -mu / r; };
  pot.dv = [mu](double r) { return mu / (r * r); };
  pot.d2v = [mu](double r) { return -2.0 * mu / (r * r * r); };
  pot.d3v = [mu](double r) { return 6.0 * mu / (r * r * r * r); };
  pot.d4v = [mu](double r) { return -24.0 * mu / (r * r * r * r * r); };

  pot.convex_part = detail::zero_curvature_part();
  pot.concave_part = {pot.v, pot.dv, pot.d2v};
  pot.superconvex_part = detail::zero_fourth_part();
  pot.superconcave_part = {pot.v, pot.dv, pot.d3v, pot.d4v};

  pot.stable_quotient = [mu](double d0, double d1) { return mu / (d0 * d1); };
  pot.stable_quotient_dd1 = [mu](double d0, double d1) { return -mu / (d0 * d1 * d1); };

  if (validate) validate_split(pot, 1e-2, 1e2);
  return pot;
}

}  // namespace splitdyn

#endif
