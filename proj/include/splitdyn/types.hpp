#ifndef SPLITDYN_TYPES_HPP
#define SPLITDYN_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitdyn {

using Vec3 = Eigen::Vector3d;

/// Positions, momenta, and time for N point masses; the fundamental
/// trajectory sample.
struct PhaseState {
  double time = 0.0;
  std::vector<Vec3> q;  // positions
  std::vector<Vec3> p;  // momenta
};

[[nodiscard]] inline bool finite(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

[[nodiscard]] inline bool valid(const PhaseState& s) {
  if (s.q.size() != s.p.size() || s.q.empty() || !std::isfinite(s.time)) return false;
  for (const Vec3& v : s.q)
    if (!finite(v)) return false;
  for (const Vec3& v : s.p)
    if (!finite(v)) return false;
  return true;
}

/// Per-step solver statistics.
struct StepReport {
  int iterations = 0;             // corrector updates applied
  double initial_residual = 0.0;  // norm at the predictor
  double final_residual = 0.0;    // norm at the accepted iterate
  bool converged = false;
  long switch_count = 0;  // pair-iteration events where the quotient rescue fired
  double energy_delta = 0.0;  // H(accepted) - H(previous)
};

struct ill_posed_mass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct singular_configuration : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct tangent_singular : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct step_failure : std::runtime_error {
  step_failure(const std::string& what, StepReport rep, std::size_t step)
      : std::runtime_error(what), report(rep), step_index(step) {}
  StepReport report;
  std::size_t step_index = 0;
};

struct config_error : std::runtime_error {
  config_error(const std::string& what, int line_number = 0)
      : std::runtime_error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + what
                                           : what),
        line(line_number) {}
  int line = 0;
};

}  // namespace splitdyn

#endif
