#ifndef SPLITDYN_SYSTEM_HPP
#define SPLITDYN_SYSTEM_HPP

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "mass_model.hpp"
#include "split_potential.hpp"
#include "types.hpp"

namespace splitdyn {

/// Every particle is tethered to the origin through the same radial
/// potential; the single-particle case is the classic nonlinear
/// central-force oscillator.
struct CentralField {
  SplitPotential potential;
};

/// One interacting pair (a, b) with its own radial potential.
struct PairBond {
  std::size_t a = 0;
  std::size_t b = 0;
  SplitPotential potential;
};

/// Explicit list of interacting pairs; pairs not listed do not interact.
struct PairTable {
  std::vector<PairBond> bonds;
};

/// A complete mechanical system: mass coefficients plus the interaction
/// topology.
struct SystemSpec {
  MassModel mass;
  std::variant<CentralField, PairTable> interaction;

  SystemSpec(MassModel m, CentralField field)
      : mass(std::move(m)), interaction(std::move(field)) {}
  SystemSpec(MassModel m, PairTable table) : mass(std::move(m)), interaction(std::move(table)) {
    for (const PairBond& bond : std::get<PairTable>(interaction).bonds)
      if (bond.a >= mass.size() || bond.b >= mass.size() || bond.a == bond.b)
        throw std::invalid_argument("pair bond references an invalid particle index");
  }

  [[nodiscard]] std::size_t particles() const { return mass.size(); }
};

/// Sum of the radial potential over all interactions at configuration q.
[[nodiscard]] inline double potential_energy(const SystemSpec& spec,
                                             const std::vector<Vec3>& q) {
  double v = 0.0;
  if (const auto* field = std::get_if<CentralField>(&spec.interaction)) {
    for (const Vec3& qa : q) {
      const double d = qa.norm();
      check_separation(field->potential, d);
      v += field->potential.v(d);
    }
  } else {
    for (const PairBond& bond : std::get<PairTable>(spec.interaction).bonds) {
      const double d = (q[bond.a] - q[bond.b]).norm();
      check_separation(bond.potential, d);
      v += bond.potential.v(d);
    }
  }
  return v;
}

[[nodiscard]] inline double kinetic_energy(const SystemSpec& spec,
                                           const std::vector<Vec3>& p) {
  return spec.mass.kinetic_energy(p);
}

[[nodiscard]] inline double total_energy(const SystemSpec& spec, const PhaseState& s) {
  return kinetic_energy(spec, s.p) + potential_energy(spec, s.q);
}

}  // namespace splitdyn

#endif
