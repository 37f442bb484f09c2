#ifndef SPLITDYN_STEP_HPP
#define SPLITDYN_STEP_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "force_law.hpp"
#include "system.hpp"
#include "types.hpp"

namespace splitdyn {

namespace detail {

/// Force contribution of one interaction, evaluated from the old and new
/// relative vectors w0, w1 (particle minus partner; the origin for a central
/// field).  g is the first particle's share of the force sum G so that the
/// momentum update reads p1 = p0 - dt * G; k is dG/d(w-new-endpoint), i.e.
/// the block the tangent assembles with +/- signs.
struct InteractionEval {
  Vec3 g = Vec3::Zero();
  Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
  bool switched = false;
};

inline InteractionEval eval_interaction(IntegratorKind kind, const SplitPotential& pot,
                                        const Vec3& w0, const Vec3& w1, double tol_q,
                                        RescueKind rescue, bool prefer_stable_quotient,
                                        bool want_tangent) {
  const double d0 = w0.norm();
  const double d1 = w1.norm();
  check_separation(pot, d0);
  check_separation(pot, d1);
  const Vec3 u = 0.5 * (w0 + w1);

  InteractionEval out;
  if (kind == IntegratorKind::MidPoint) {
    // G = V'(dm) u / dm with dm = |u|: the only rule whose denominator is the
    // separation of the averaged configuration rather than d0 + d1.
    const double dm = u.norm();
    check_separation(pot, dm);
    const ForceEval fe = lambda_midpoint(pot, dm);
    out.g = (fe.lambda / dm) * u;
    if (want_tangent) {
      const Eigen::Matrix3d uu = u * u.transpose();
      out.k = (0.5 * fe.dlambda / (dm * dm)) * uu +
              fe.lambda * (Eigen::Matrix3d::Identity() / (2.0 * dm) - uu / (2.0 * dm * dm * dm));
    }
    return out;
  }

  // Quotient family: G = 2 Lambda u / (d0 + d1).
  const double s = d0 + d1;
  const ForceEval fe = force_lambda(kind, pot, d0, d1, 0.0, tol_q, rescue, prefer_stable_quotient);
  out.g = (2.0 * fe.lambda / s) * u;
  out.switched = fe.switched;
  if (want_tangent) {
    // d(d1)/dq1 = w1/d1 enters through both Lambda and the denominator.
    const Eigen::Matrix3d uw = u * w1.transpose();
    out.k = (2.0 * fe.dlambda / (s * d1)) * uw +
            (fe.lambda / s) * Eigen::Matrix3d::Identity() - (2.0 * fe.lambda / (s * s * d1)) * uw;
  }
  return out;
}

/// One sweep over all interactions: accumulates the force sum G per particle
/// and, when c != nullptr, the 3N x 3N blocks of dG/dq_new.  Buffers must be
/// pre-sized and zeroed by the caller.
inline void accumulate_forces(IntegratorKind kind, const SystemSpec& spec,
                              const std::vector<Vec3>& q0, const std::vector<Vec3>& q1,
                              double tol_q, RescueKind rescue, bool prefer_stable_quotient,
                              std::vector<Vec3>& g, Eigen::MatrixXd* c, long& switches) {
  const bool want_tangent = (c != nullptr);
  const auto add_block = [&](std::size_t row, std::size_t col, const Eigen::Matrix3d& k,
                             double sign) {
    c->block<3, 3>(3 * static_cast<Eigen::Index>(row), 3 * static_cast<Eigen::Index>(col)) +=
        sign * k;
  };

  if (const auto* field = std::get_if<CentralField>(&spec.interaction)) {
    for (std::size_t a = 0; a < q0.size(); ++a) {
      const InteractionEval e = eval_interaction(kind, field->potential, q0[a], q1[a], tol_q,
                                                 rescue, prefer_stable_quotient, want_tangent);
      g[a] += e.g;
      if (e.switched) ++switches;
      if (want_tangent) add_block(a, a, e.k, 1.0);
    }
    return;
  }

  for (const PairBond& bond : std::get<PairTable>(spec.interaction).bonds) {
    const InteractionEval e =
        eval_interaction(kind, bond.potential, q0[bond.a] - q0[bond.b], q1[bond.a] - q1[bond.b],
                         tol_q, rescue, prefer_stable_quotient, want_tangent);
    g[bond.a] += e.g;
    g[bond.b] -= e.g;  // exact negation keeps the pair antisymmetric to the bit
    if (e.switched) ++switches;
    if (want_tangent) {
      add_block(bond.a, bond.a, e.k, 1.0);
      add_block(bond.a, bond.b, e.k, -1.0);
      add_block(bond.b, bond.b, e.k, 1.0);
      add_block(bond.b, bond.a, e.k, -1.0);
    }
  }
}

}  // namespace detail

/// Impulse the step applies to particle A through one pair interaction
/// (A gains `impulse`, B gains exactly `-impulse`).
struct PairForce {
  Vec3 impulse = Vec3::Zero();
  bool switched = false;
};

[[nodiscard]] inline PairForce pair_force(IntegratorKind kind, const SplitPotential& pot,
                                          const Vec3& q_a_old, const Vec3& q_a_new,
                                          const Vec3& q_b_old, const Vec3& q_b_new, double dt,
                                          double tol_q, RescueKind rescue,
                                          bool prefer_stable_quotient = true) {
  const detail::InteractionEval e =
      detail::eval_interaction(kind, pot, q_a_old - q_b_old, q_a_new - q_b_new, tol_q, rescue,
                               prefer_stable_quotient, false);
  return {(-dt) * e.g, e.switched};
}

/// Residual of the one-step equations at a trial endpoint (q_new, p_new):
///   r_q = q_new - q_old - dt/2 M^-1 (p_old + p_new)
///   r_p = p_new - p_old + dt G(q_old, q_new)
struct StepResidual {
  std::vector<Vec3> r_q;
  std::vector<Vec3> r_p;
  long switch_count = 0;

  [[nodiscard]] bool any_switched() const { return switch_count > 0; }
  [[nodiscard]] double norm() const {
    double sq = 0.0;
    for (const Vec3& v : r_q) sq += v.squaredNorm();
    for (const Vec3& v : r_p) sq += v.squaredNorm();
    return std::sqrt(sq);
  }
};

[[nodiscard]] inline StepResidual step_residual(IntegratorKind kind, const SystemSpec& spec,
                                                const PhaseState& old_state,
                                                const PhaseState& guess, double dt, double tol_q,
                                                RescueKind rescue,
                                                bool prefer_stable_quotient = true) {
  const std::size_t n = spec.particles();
  StepResidual res;
  res.r_q.assign(n, Vec3::Zero());
  res.r_p.assign(n, Vec3::Zero());

  std::vector<Vec3> psum(n);
  for (std::size_t a = 0; a < n; ++a) psum[a] = old_state.p[a] + guess.p[a];
  const std::vector<Vec3> v = spec.mass.solve(psum);

  std::vector<Vec3> g(n, Vec3::Zero());
  detail::accumulate_forces(kind, spec, old_state.q, guess.q, tol_q, rescue,
                            prefer_stable_quotient, g, nullptr, res.switch_count);

  for (std::size_t a = 0; a < n; ++a) {
    res.r_q[a] = guess.q[a] - old_state.q[a] - 0.5 * dt * v[a];
    res.r_p[a] = guess.p[a] - old_state.p[a] + dt * g[a];
  }
  return res;
}

/// d(r_p)/d(q_new) as a dense 3N x 3N matrix (the dt factor included); the
/// remaining blocks of the full linearization are constant and assembled by
/// the solver.
[[nodiscard]] inline Eigen::MatrixXd step_tangent(IntegratorKind kind, const SystemSpec& spec,
                                                  const PhaseState& old_state,
                                                  const PhaseState& guess, double dt, double tol_q,
                                                  RescueKind rescue,
                                                  bool prefer_stable_quotient = true) {
  const std::size_t n = spec.particles();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3 * static_cast<Eigen::Index>(n),
                                            3 * static_cast<Eigen::Index>(n));
  std::vector<Vec3> g(n, Vec3::Zero());
  long switches = 0;
  detail::accumulate_forces(kind, spec, old_state.q, guess.q, tol_q, rescue,
                            prefer_stable_quotient, g, &c, switches);
  return dt * c;
}

}  // namespace splitdyn

#endif
