#ifndef SPLITDYN_DIAGNOSTICS_HPP
#define SPLITDYN_DIAGNOSTICS_HPP

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "invariants.hpp"
#include "newton.hpp"
#include "system.hpp"
#include "types.hpp"

namespace splitdyn {

/// Drift of the conserved quantities along a sampled trajectory, all relative
/// to the first sample: dH (scalar energy), dJ (angular momentum), dL (linear
/// momentum), dC (Galilean center of mass).
struct InvariantSeries {
  std::vector<double> times;
  std::vector<double> dH;
  std::vector<Vec3> dJ;
  std::vector<Vec3> dL;
  std::vector<Vec3> dC;
};

[[nodiscard]] inline InvariantSeries invariant_series(const std::vector<PhaseState>& trajectory,
                                                      const SystemSpec& spec) {
  InvariantSeries series;
  if (trajectory.empty()) return series;
  const double h0 = total_energy(spec, trajectory.front());
  const Vec3 j0 = angular_momentum(trajectory.front());
  const Vec3 l0 = linear_momentum(trajectory.front());
  const Vec3 c0 = center_of_mass(spec, trajectory.front());
  series.times.reserve(trajectory.size());
  for (const PhaseState& s : trajectory) {
    series.times.push_back(s.time);
    series.dH.push_back(total_energy(spec, s) - h0);
    series.dJ.push_back(angular_momentum(s) - j0);
    series.dL.push_back(linear_momentum(s) - l0);
    series.dC.push_back(center_of_mass(spec, s) - c0);
  }
  return series;
}

/// Checks that sampled energy never rises by more than `slack` between
/// consecutive samples.
struct MonotonicityReport {
  bool non_increasing = true;
  double max_rise = 0.0;       // largest positive jump between samples
  std::size_t first_violation = static_cast<std::size_t>(-1);
  double total_drop = 0.0;     // dH at the last sample (<= 0 when dissipative)
};

[[nodiscard]] inline MonotonicityReport monotonicity_report(const InvariantSeries& series,
                                                            double slack) {
  MonotonicityReport rep;
  for (std::size_t i = 1; i < series.dH.size(); ++i) {
    const double rise = series.dH[i] - series.dH[i - 1];
    if (rise > rep.max_rise) rep.max_rise = rise;
    if (rise > slack && rep.non_increasing) {
      rep.non_increasing = false;
      rep.first_violation = i;
    }
  }
  if (!series.dH.empty()) rep.total_drop = series.dH.back();
  return rep;
}

/// High-accuracy endpoint state: the symmetric midpoint rule at dt_fine and
/// dt_fine/2, combined by Richardson extrapolation (the rule's error expands
/// in even powers, so the pair difference cancels the leading term).  The
/// recorded gaps measure how far apart the two resolutions were and bound the
/// reference's own error.
struct VerifiedReference {
  PhaseState state;
  double rel_gap_q = 0.0;
  double rel_gap_p = 0.0;
};

namespace detail {

[[nodiscard]] inline std::size_t checked_steps(double T, double dt) {
  const double raw = T / dt;
  const auto steps = static_cast<std::size_t>(std::llround(raw));
  if (steps == 0 || std::fabs(static_cast<double>(steps) * dt - T) > 1e-9 * std::fabs(T))
    throw std::invalid_argument("T must be an integral number of steps of dt");
  return steps;
}

[[nodiscard]] inline double stacked_norm(const std::vector<Vec3>& v) {
  double sq = 0.0;
  for (const Vec3& x : v) sq += x.squaredNorm();
  return std::sqrt(sq);
}

[[nodiscard]] inline double stacked_distance(const std::vector<Vec3>& a,
                                             const std::vector<Vec3>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sq);
}

}  // namespace detail

[[nodiscard]] inline VerifiedReference verified_reference(const SystemSpec& spec,
                                                          const PhaseState& s0, double T,
                                                          double dt_fine,
                                                          const SolverConfig& cfg) {
  const std::size_t steps = detail::checked_steps(T, dt_fine);
  const auto sink = [](const PhaseState&, const StepReport&) {};
  const PhaseState coarse =
      integrate_observe(spec, IntegratorKind::MidPoint, s0, dt_fine, steps, cfg, sink);
  const PhaseState fine =
      integrate_observe(spec, IntegratorKind::MidPoint, s0, 0.5 * dt_fine, 2 * steps, cfg, sink);

  VerifiedReference ref;
  ref.state.time = fine.time;
  ref.state.q.resize(fine.q.size());
  ref.state.p.resize(fine.p.size());
  for (std::size_t a = 0; a < fine.q.size(); ++a) {
    ref.state.q[a] = fine.q[a] + (fine.q[a] - coarse.q[a]) / 3.0;
    ref.state.p[a] = fine.p[a] + (fine.p[a] - coarse.p[a]) / 3.0;
  }
  const double tiny = std::numeric_limits<double>::min();
  ref.rel_gap_q = detail::stacked_distance(fine.q, coarse.q) /
                  std::max(detail::stacked_norm(fine.q), tiny);
  ref.rel_gap_p = detail::stacked_distance(fine.p, coarse.p) /
                  std::max(detail::stacked_norm(fine.p), tiny);
  return ref;
}

[[nodiscard]] inline PhaseState reference_solution(const SystemSpec& spec, const PhaseState& s0,
                                                   double T, double dt_fine,
                                                   const SolverConfig& cfg) {
  return verified_reference(spec, s0, T, dt_fine, cfg).state;
}

/// Endpoint errors against a reference at a ladder of step sizes, with the
/// observed orders between consecutive rows.  The first row's orders are NaN.
struct ConvergenceRow {
  double dt = 0.0;
  double rel_err_q = 0.0;
  double rel_err_p = 0.0;
  double order_q = std::numeric_limits<double>::quiet_NaN();
  double order_p = std::numeric_limits<double>::quiet_NaN();
};

[[nodiscard]] inline std::vector<ConvergenceRow> convergence_study(
    const SystemSpec& spec, IntegratorKind kind, const PhaseState& s0, double T,
    const std::vector<double>& dt_list, const PhaseState& reference, const SolverConfig& cfg) {
  const double tiny = std::numeric_limits<double>::min();
  const double ref_q = std::max(detail::stacked_norm(reference.q), tiny);
  const double ref_p = std::max(detail::stacked_norm(reference.p), tiny);

  std::vector<ConvergenceRow> rows;
  rows.reserve(dt_list.size());
  for (const double dt : dt_list) {
    const std::size_t steps = detail::checked_steps(T, dt);
    const PhaseState end = integrate_observe(spec, kind, s0, dt, steps, cfg,
                                             [](const PhaseState&, const StepReport&) {});
    ConvergenceRow row;
    row.dt = dt;
    row.rel_err_q = detail::stacked_distance(end.q, reference.q) / ref_q;
    row.rel_err_p = detail::stacked_distance(end.p, reference.p) / ref_p;
    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      const double ratio = std::log(prev.dt / row.dt);
      row.order_q = std::log(prev.rel_err_q / row.rel_err_q) / ratio;
      row.order_p = std::log(prev.rel_err_p / row.rel_err_p) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

// --- plain-text cache for expensive reference states ---------------------

namespace detail {

inline void print_g17(std::string& out, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

}  // namespace detail

/// Loads a cached reference previously stored under exactly this key.
[[nodiscard]] inline std::optional<VerifiedReference> load_reference(const std::string& path,
                                                                     const std::string& key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != "# reference state v1") return std::nullopt;
  if (!std::getline(in, line) || line != "key " + key) return std::nullopt;

  VerifiedReference ref;
  std::size_t n = 0;
  {
    std::string tag;
    if (!(in >> tag >> ref.state.time) || tag != "time") return std::nullopt;
    if (!(in >> tag >> n) || tag != "particles" || n == 0) return std::nullopt;
    if (!(in >> tag >> ref.rel_gap_q) || tag != "gap_q") return std::nullopt;
    if (!(in >> tag >> ref.rel_gap_p) || tag != "gap_p") return std::nullopt;
  }
  ref.state.q.resize(n);
  ref.state.p.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::string tag;
    if (!(in >> tag >> ref.state.q[a][0] >> ref.state.q[a][1] >> ref.state.q[a][2]) || tag != "q")
      return std::nullopt;
  }
  for (std::size_t a = 0; a < n; ++a) {
    std::string tag;
    if (!(in >> tag >> ref.state.p[a][0] >> ref.state.p[a][1] >> ref.state.p[a][2]) || tag != "p")
      return std::nullopt;
  }
  if (!valid(ref.state)) return std::nullopt;
  return ref;
}

/// Stores a reference state under a key; the write goes through a temporary
/// file and an atomic rename so a crashed run never leaves a torn cache.
inline void store_reference(const std::string& path, const std::string& key,
                            const VerifiedReference& ref) {
  std::string body = "# reference state v1\nkey " + key + "\ntime ";
  detail::print_g17(body, ref.state.time);
  body += "\nparticles " + std::to_string(ref.state.q.size());
  body += "\ngap_q ";
  detail::print_g17(body, ref.rel_gap_q);
  body += "\ngap_p ";
  detail::print_g17(body, ref.rel_gap_p);
  body += "\n";
  for (const Vec3& q : ref.state.q) {
    body += "q";
    for (int i = 0; i < 3; ++i) {
      body += ' ';
      detail::print_g17(body, q[i]);
    }
    body += "\n";
  }
  for (const Vec3& p : ref.state.p) {
    body += "p";
    for (int i = 0; i < 3; ++i) {
      body += ' ';
      detail::print_g17(body, p[i]);
    }
    body += "\n";
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << body;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

/// Load-or-compute wrapper around the reference cache.
template <typename Factory>
[[nodiscard]] VerifiedReference cached_reference(const std::string& path, const std::string& key,
                                                 Factory&& factory) {
  if (auto hit = load_reference(path, key)) return *hit;
  VerifiedReference ref = factory();
  store_reference(path, key, ref);
  return ref;
}

}  // namespace splitdyn

#endif
