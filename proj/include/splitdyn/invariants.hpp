#ifndef SPLITDYN_INVARIANTS_HPP
#define SPLITDYN_INVARIANTS_HPP

#include <cstddef>
#include <vector>

#include "system.hpp"
#include "types.hpp"

namespace splitdyn {

/// J = sum_A q_A x p^A.
[[nodiscard]] inline Vec3 angular_momentum(const PhaseState& s) {
  Vec3 j = Vec3::Zero();
  for (std::size_t a = 0; a < s.q.size(); ++a) j += s.q[a].cross(s.p[a]);
  return j;
}

/// L = sum_A p^A.
[[nodiscard]] inline Vec3 linear_momentum(const PhaseState& s) {
  Vec3 l = Vec3::Zero();
  for (const Vec3& p : s.p) l += p;
  return l;
}

/// Galilean center-of-mass invariant
///   C = (sum_AB m_AB q_B - t L) / sum_AB m_AB,
/// constant along any momentum-conserving trajectory.
[[nodiscard]] inline Vec3 center_of_mass(const SystemSpec& spec, const PhaseState& s) {
  Vec3 weighted = Vec3::Zero();
  for (std::size_t a = 0; a < s.q.size(); ++a) weighted += spec.mass.row_weight(a) * s.q[a];
  return (weighted - s.time * linear_momentum(s)) / spec.mass.total();
}

}  // namespace splitdyn

#endif
