#ifndef SPLITDYN_NEWTON_HPP
#define SPLITDYN_NEWTON_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "invariants.hpp"
#include "step.hpp"
#include "system.hpp"
#include "types.hpp"

namespace splitdyn {

/// Tolerances and limits of the per-step Newton corrector plus the quotient
/// switching policy handed down to the force evaluation.
struct SolverConfig {
  double tol_r = 1e-10;  // stop once |r| <= tol_r * |r at predictor|
  double tol_a = 1e-15;  // ... or |r| <= tol_a outright
  int l_max = 20;        // corrector updates before the step is abandoned
  double tol_q = 1e-8;   // |d1 - d0| at or below this switches the quotient
  RescueKind rescue = RescueKind::JanzMidpoint;
  bool prefer_stable_quotient = true;  // use a potential's closed-form quotient when available

  // Accept the l_max-th iterate (converged = false) instead of throwing
  // step_failure.  Off by default; the switching-robustness sweep enables it
  // because a wide switching window can park a step between the two force
  // branches, where no self-consistent solution exists and the stalled
  // iterate's error is itself the instability being measured.
  bool accept_after_l_max = false;
};

/// Preallocated buffers for repeated advance() calls on one system.  Holds
/// the coordinate-expanded mass matrices, so it is tied to the SystemSpec it
/// was built from.
class StepWorkspace {
 public:
  explicit StepWorkspace(const SystemSpec& spec) : n_(spec.particles()) {
    const auto n = static_cast<Eigen::Index>(n_);
    const Eigen::Index n3 = 3 * n;
    minv3_.setZero(n3, n3);
    m3_.setZero(n3, n3);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index i = 0; i < 3; ++i) {
          minv3_(3 * a + i, 3 * b + i) = spec.mass.inverse()(a, b);
          m3_(3 * a + i, 3 * b + i) = spec.mass.coefficients()(a, b);
        }
    q1_.resize(n_);
    p1_.resize(n_);
    g_.resize(n_);
    r_q_.resize(n_);
    r_p_.resize(n_);
    c_.resize(n3, n3);
    h_.resize(n3, n3);
    rq_flat_.resize(n3);
    rp_flat_.resize(n3);
    rhs_.resize(n3);
    dq_.resize(n3);
    dp_.resize(n3);
    tmp_.resize(n3);
    check_.resize(n3);
    rhs3_.resize(n, 3);
    sol3_.resize(n, 3);
  }

  [[nodiscard]] std::size_t particles() const { return n_; }

  // Scratch storage below is owned by advance(); not part of the API.
  std::size_t n_;
  Eigen::MatrixXd minv3_, m3_;  // M^-1 and M expanded over coordinates
  std::vector<Vec3> q1_, p1_, g_, r_q_, r_p_;
  Eigen::MatrixXd c_, h_;
  Eigen::VectorXd rq_flat_, rp_flat_, rhs_, dq_, dp_, tmp_, check_;
  Eigen::MatrixX3d rhs3_, sol3_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

namespace detail {

[[nodiscard]] inline double kinetic_energy_ws(const SystemSpec& spec,
                                              const std::vector<Vec3>& p,
                                              Eigen::MatrixX3d& rhs3, Eigen::MatrixX3d& sol3) {
  const auto n = static_cast<Eigen::Index>(p.size());
  for (Eigen::Index a = 0; a < n; ++a) rhs3.row(a) = p[static_cast<std::size_t>(a)].transpose();
  spec.mass.solve_into(rhs3, sol3);
  double k = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) k += rhs3.row(a).dot(sol3.row(a));
  return 0.5 * k;
}

}  // namespace detail

/// One time step by the trivial predictor (hold q, p) followed by Newton
/// corrections of the coupled one-step equations.  The linear solve is
/// segregated: with c = d(r_p)/dq_new / dt,
///   [ I + dt^2/2 M^-1 c ] dq = -r_q - dt/2 M^-1 r_p,
///   dp = 2/dt M (r_q + dq),
/// which is the exact block elimination of the full 6N x 6N system.  The
/// stopping test runs on each iterate's residual, and the update built from
/// the first passing iterate is the state accepted, so the accepted residual
/// sits at the test's quadratic image rather than at the tolerance itself.
/// Throws step_failure if l_max corrections do not meet the tolerance and
/// tangent_singular if the reduced matrix cannot be solved reliably.
[[nodiscard]] inline std::pair<PhaseState, StepReport> advance(
    const SystemSpec& spec, IntegratorKind kind, const PhaseState& s0, double dt,
    const SolverConfig& cfg, StepWorkspace& ws, std::size_t step_index = 0) {
  const std::size_t n = spec.particles();
  if (s0.q.size() != n || s0.p.size() != n)
    throw std::invalid_argument("state size does not match the system");
  if (ws.particles() != n) throw std::invalid_argument("workspace built for a different system");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");

  StepReport report;

  const double h_old =
      detail::kinetic_energy_ws(spec, s0.p, ws.rhs3_, ws.sol3_) + potential_energy(spec, s0.q);

  ws.q1_ = s0.q;  // trivial predictor
  ws.p1_ = s0.p;

  // Residual at the current iterate; rescue firings accumulate in the report.
  const auto residual = [&]() -> double {
    const auto nn = static_cast<Eigen::Index>(n);
    for (Eigen::Index a = 0; a < nn; ++a) {
      const auto sa = static_cast<std::size_t>(a);
      ws.rhs3_.row(a) = (s0.p[sa] + ws.p1_[sa]).transpose();
    }
    spec.mass.solve_into(ws.rhs3_, ws.sol3_);

    for (std::size_t a = 0; a < n; ++a) ws.g_[a] = Vec3::Zero();
    detail::accumulate_forces(kind, spec, s0.q, ws.q1_, cfg.tol_q, cfg.rescue,
                              cfg.prefer_stable_quotient, ws.g_, nullptr, report.switch_count);

    double sq = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const auto ia = static_cast<Eigen::Index>(a);
      ws.r_q_[a] = ws.q1_[a] - s0.q[a] - 0.5 * dt * ws.sol3_.row(ia).transpose();
      ws.r_p_[a] = ws.p1_[a] - s0.p[a] + dt * ws.g_[a];
      sq += ws.r_q_[a].squaredNorm() + ws.r_p_[a].squaredNorm();
    }
    return std::sqrt(sq);
  };

  double nr = residual();
  report.initial_residual = nr;
  int iters = 0;

  // The stopping test examines the residual of the current iterate, but the
  // accepted state is one corrector update beyond it: the update built from a
  // passing iterate is the one kept, so the accepted residual is the
  // quadratic image of the tested one.  Without that final update the kept
  // momentum residual hugs the tolerance, and its slowly-varying direction
  // can walk the momentum maps measurably over very long runs.
  bool passed = false;
  while (true) {
    if (nr == 0.0) {  // exact iterate: a further update is a no-op
      report.converged = true;
      break;
    }
    passed = (nr <= cfg.tol_a || nr <= cfg.tol_r * report.initial_residual);
    if (iters >= cfg.l_max) {
      report.iterations = iters;
      report.final_residual = nr;
      if (passed) {  // no budget left for the final update; keep the iterate
        report.converged = true;
        break;
      }
      if (cfg.accept_after_l_max) break;  // report.converged stays false
      throw step_failure("corrector did not reach tolerance within l_max = " +
                             std::to_string(cfg.l_max) + " updates",
                         report, step_index);
    }

    // Tangent sweep (rescue counts from it would duplicate the residual's).
    ws.c_.setZero();
    for (std::size_t a = 0; a < n; ++a) ws.g_[a] = Vec3::Zero();
    long tangent_switches = 0;
    detail::accumulate_forces(kind, spec, s0.q, ws.q1_, cfg.tol_q, cfg.rescue,
                              cfg.prefer_stable_quotient, ws.g_, &ws.c_, tangent_switches);

    ws.h_.noalias() = ws.minv3_ * ws.c_;
    ws.h_ *= 0.5 * dt * dt;
    ws.h_.diagonal().array() += 1.0;

    for (std::size_t a = 0; a < n; ++a) {
      const auto ia = static_cast<Eigen::Index>(a);
      ws.rq_flat_.segment<3>(3 * ia) = ws.r_q_[a];
      ws.rp_flat_.segment<3>(3 * ia) = ws.r_p_[a];
    }
    ws.rhs_.noalias() = ws.minv3_ * ws.rp_flat_;
    ws.rhs_ *= -0.5 * dt;
    ws.rhs_ -= ws.rq_flat_;

    ws.lu_.compute(ws.h_);
    ws.dq_ = ws.lu_.solve(ws.rhs_);
    ws.check_.noalias() = ws.h_ * ws.dq_;
    ws.check_ -= ws.rhs_;
    if (!ws.dq_.allFinite() ||
        ws.check_.norm() > 1e-6 * (ws.rhs_.norm() + ws.dq_.norm() + 1.0))
      throw tangent_singular("reduced corrector matrix is numerically singular");

    ws.tmp_ = ws.rq_flat_ + ws.dq_;
    ws.dp_.noalias() = ws.m3_ * ws.tmp_;
    ws.dp_ *= 2.0 / dt;

    for (std::size_t a = 0; a < n; ++a) {
      const auto ia = static_cast<Eigen::Index>(a);
      ws.q1_[a] += ws.dq_.segment<3>(3 * ia);
      ws.p1_[a] += ws.dp_.segment<3>(3 * ia);
    }
    ++iters;
    nr = residual();
    if (passed) {  // this update was the final one built from a passing iterate
      report.converged = true;
      break;
    }
  }

  report.iterations = iters;
  report.final_residual = nr;

  PhaseState next;
  next.time = s0.time + dt;
  next.q = ws.q1_;
  next.p = ws.p1_;
  report.energy_delta = detail::kinetic_energy_ws(spec, next.p, ws.rhs3_, ws.sol3_) +
                        potential_energy(spec, next.q) - h_old;
  return {std::move(next), report};
}

[[nodiscard]] inline std::pair<PhaseState, StepReport> advance(const SystemSpec& spec,
                                                               IntegratorKind kind,
                                                               const PhaseState& s0, double dt,
                                                               const SolverConfig& cfg) {
  StepWorkspace ws(spec);
  return advance(spec, kind, s0, dt, cfg, ws);
}

/// Fixed-step march calling obs(state, report) after every accepted step;
/// returns the final state.  Time is reconstructed as t0 + (i+1) dt so long
/// runs do not accumulate additive drift.
template <typename Observer>
[[nodiscard]] PhaseState integrate_observe(const SystemSpec& spec, IntegratorKind kind,
                                           const PhaseState& s0, double dt, std::size_t steps,
                                           const SolverConfig& cfg, Observer&& obs) {
  StepWorkspace ws(spec);
  PhaseState state = s0;
  for (std::size_t i = 0; i < steps; ++i) {
    auto [next, report] = advance(spec, kind, state, dt, cfg, ws, i);
    next.time = s0.time + static_cast<double>(i + 1) * dt;
    state = std::move(next);
    obs(state, report);
  }
  return state;
}

/// Fixed-step trajectory, keeping the initial state, every sample_stride-th
/// state, and always the final one.
[[nodiscard]] inline std::vector<PhaseState> integrate(const SystemSpec& spec,
                                                       IntegratorKind kind, const PhaseState& s0,
                                                       double dt, std::size_t steps,
                                                       const SolverConfig& cfg,
                                                       std::size_t sample_stride = 1) {
  if (sample_stride == 0) throw std::invalid_argument("sample_stride must be positive");
  std::vector<PhaseState> out;
  out.reserve(steps / sample_stride + 2);
  out.push_back(s0);
  std::size_t i = 0;
  const PhaseState last = integrate_observe(spec, kind, s0, dt, steps, cfg,
                                            [&](const PhaseState& state, const StepReport&) {
                                              ++i;
                                              if (i % sample_stride == 0 && i != steps)
                                                out.push_back(state);
                                            });
  if (steps > 0) out.push_back(last);
  return out;
}

/// Variable-step trajectory following an explicit per-step dt schedule;
/// every state is kept.
[[nodiscard]] inline std::vector<PhaseState> integrate(const SystemSpec& spec,
                                                       IntegratorKind kind, const PhaseState& s0,
                                                       const std::vector<double>& dt_schedule,
                                                       const SolverConfig& cfg) {
  StepWorkspace ws(spec);
  std::vector<PhaseState> out;
  out.reserve(dt_schedule.size() + 1);
  out.push_back(s0);
  for (std::size_t i = 0; i < dt_schedule.size(); ++i) {
    auto [next, report] = advance(spec, kind, out.back(), dt_schedule[i], cfg, ws, i);
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace splitdyn

#endif
