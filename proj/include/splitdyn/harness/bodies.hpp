#ifndef SPLITDYN_HARNESS_BODIES_HPP
#define SPLITDYN_HARNESS_BODIES_HPP

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../potentials.hpp"
#include "../system.hpp"
#include "../types.hpp"
#include "config.hpp"

namespace splitdyn {

struct BodyRecord {
  std::string name;
  double mass = 0.0;
  Vec3 q = Vec3::Zero();
  Vec3 p = Vec3::Zero();
};

/// Contents of a bodies file: the gravitational constant in the file's unit
/// system, a units label, and one record per body.
struct BodiesFile {
  double G = 0.0;
  std::string units;
  std::vector<BodyRecord> bodies;
};

/// Reads the plain-text bodies format:
///   # comments
///   G = <value>
///   units = <label>
///   <name> <mass> <qx> <qy> <qz> <px> <py> <pz>
/// Header lines must precede the body rows.  Malformed input is reported
/// with its line number.
[[nodiscard]] inline BodiesFile load_bodies(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open bodies file " + path);

  BodiesFile file;
  bool have_g = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key == "G") {
        char* end = nullptr;
        file.G = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0' || !(file.G > 0.0))
          throw config_error("G must be a positive number, got \"" + value + "\"", line_no);
        have_g = true;
      } else if (key == "units") {
        file.units = value;
      } else {
        throw config_error("unknown header key \"" + key + "\"", line_no);
      }
      if (!file.bodies.empty())
        throw config_error("header line after body rows", line_no);
      continue;
    }

    std::istringstream row(line);
    BodyRecord body;
    if (!(row >> body.name >> body.mass >> body.q[0] >> body.q[1] >> body.q[2] >> body.p[0] >>
          body.p[1] >> body.p[2]))
      throw config_error("expected: name mass qx qy qz px py pz", line_no);
    std::string extra;
    if (row >> extra) throw config_error("trailing token \"" + extra + "\"", line_no);
    if (!(body.mass > 0.0))
      throw config_error("body \"" + body.name + "\" must have positive mass", line_no);
    if (!finite(body.q) || !finite(body.p))
      throw config_error("body \"" + body.name + "\" has non-finite data", line_no);
    file.bodies.push_back(std::move(body));
  }
  if (!have_g) throw config_error("bodies file " + path + " is missing the G header");
  if (file.bodies.size() < 2)
    throw config_error("bodies file " + path + " needs at least two bodies");
  return file;
}

/// Builds the all-pairs gravitating system and its initial state from a
/// bodies file.  Every pair potential carries the closed-form stable
/// quotient; whether it is used is decided by the solver configuration.
[[nodiscard]] inline std::pair<SystemSpec, PhaseState> make_gravity_system(
    const BodiesFile& file) {
  std::vector<double> masses;
  masses.reserve(file.bodies.size());
  PhaseState state;
  for (const BodyRecord& body : file.bodies) {
    masses.push_back(body.mass);
    state.q.push_back(body.q);
    state.p.push_back(body.p);
  }

  PairTable table;
  for (std::size_t a = 0; a < file.bodies.size(); ++a)
    for (std::size_t b = a + 1; b < file.bodies.size(); ++b)
      table.bonds.push_back(
          {a, b, gravitational(file.G * masses[a] * masses[b], /*validate=*/false)});

  return {SystemSpec(MassModel::diagonal(masses), std::move(table)), std::move(state)};
}

}  // namespace splitdyn

#endif
