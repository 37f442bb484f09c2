#ifndef SPLITDYN_HARNESS_EXPERIMENTS_HPP
#define SPLITDYN_HARNESS_EXPERIMENTS_HPP

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "../diagnostics.hpp"
#include "../newton.hpp"
#include "../potentials.hpp"
#include "../system.hpp"
#include "bodies.hpp"
#include "config.hpp"
#include "csv.hpp"

namespace splitdyn {

[[nodiscard]] inline IntegratorKind parse_integrator(const std::string& name) {
  for (const IntegratorKind kind :
       {IntegratorKind::MidPoint, IntegratorKind::LaBuddeGreenspan, IntegratorKind::GeneralizedEyre,
        IntegratorKind::PerturbedMidPoint, IntegratorKind::PerturbedTrapezoidal})
    if (name == to_string(kind)) return kind;
  throw config_error("unknown integrator \"" + name +
                     "\" (expected mid-point, labudde-greenspan, generalized-eyre, "
                     "perturbed-midpoint, or perturbed-trapezoidal)");
}

[[nodiscard]] inline RescueKind parse_rescue(const std::string& name) {
  for (const RescueKind rescue :
       {RescueKind::JanzMidpoint, RescueKind::GonzalezThirdDerivative, RescueKind::GeneralizedEyre,
        RescueKind::PerturbedMidPoint, RescueKind::PerturbedTrapezoidal})
    if (name == to_string(rescue)) return rescue;
  throw config_error("unknown rescue \"" + name +
                     "\" (expected janz-midpoint, gonzalez-third-derivative, generalized-eyre, "
                     "perturbed-midpoint, or perturbed-trapezoidal)");
}

/// A system together with its initial state.
struct ExperimentSetup {
  SystemSpec system;
  PhaseState initial;
};

/// Stiff radial neo-Hookean tether: one particle of mass 10 launched from
/// (2,1,1) with momentum (-30,15,45) against a stiffness-1000 potential with
/// rest length 4.
[[nodiscard]] inline ExperimentSetup make_neo_hookean_spring() {
  SystemSpec spec(MassModel::uniform(1, 10.0), CentralField{neo_hookean({1000.0, 4.0})});
  PhaseState s0;
  s0.q = {Vec3(2.0, 1.0, 1.0)};
  s0.p = {Vec3(-30.0, 15.0, 45.0)};
  return {std::move(spec), std::move(s0)};
}

/// Two unit masses in a deep Lennard-Jones well (epsilon 100, sigma 1),
/// started just inside the minimum with unequal transverse momenta.
[[nodiscard]] inline ExperimentSetup make_lj_pair() {
  PairTable table;
  table.bonds.push_back({0, 1, lennard_jones({100.0, 1.0})});
  SystemSpec spec(MassModel::uniform(2, 1.0), std::move(table));
  PhaseState s0;
  s0.q = {Vec3(0.0, -0.5612, 0.0), Vec3(0.0, 0.5612, 0.0)};
  s0.p = {Vec3(5.0, 0.0, 0.0), Vec3(10.0, 0.0, 0.0)};
  return {std::move(spec), std::move(s0)};
}

[[nodiscard]] inline ExperimentSetup make_gravity_experiment(const std::string& bodies_path) {
  auto [spec, state] = make_gravity_system(load_bodies(bodies_path));
  return {std::move(spec), std::move(state)};
}

/// Everything a harness run needs: the preset, the update rule, the step
/// schedule, the solver settings, and where (if anywhere) to write output.
struct ExperimentConfig {
  std::string system = "neo-hookean-spring";
  IntegratorKind integrator = IntegratorKind::LaBuddeGreenspan;
  double dt = 1e-3;
  double T = 10.0;
  SolverConfig solver;
  std::size_t sample_stride = 1;
  std::string bodies_file;
  std::string invariants_out;
  std::string trajectory_out;
};

/// Reads an ExperimentConfig from a parsed key = value file, applying
/// per-system defaults and rejecting unknown keys.
[[nodiscard]] inline ExperimentConfig experiment_from_config(Config& cfg) {
  ExperimentConfig ec;
  ec.system = cfg.get_string("system", ec.system);
  if (ec.system != "neo-hookean-spring" && ec.system != "lj-pair" && ec.system != "solar" &&
      ec.system != "custom-file")
    throw config_error("unknown system \"" + ec.system +
                           "\" (expected neo-hookean-spring, lj-pair, solar, or custom-file)",
                       cfg.line_of("system"));
  const bool many_body = ec.system != "neo-hookean-spring";
  const bool gravity = ec.system == "solar" || ec.system == "custom-file";

  try {
    ec.integrator = parse_integrator(cfg.get_string("integrator", "labudde-greenspan"));
  } catch (const config_error& e) {
    throw config_error(e.what(), cfg.line_of("integrator"));
  }
  try {
    ec.solver.rescue = parse_rescue(cfg.get_string("rescue", "janz-midpoint"));
  } catch (const config_error& e) {
    throw config_error(e.what(), cfg.line_of("rescue"));
  }

  ec.dt = cfg.get_double("dt", gravity ? 5.0 : 1e-3);
  if (!(ec.dt > 0.0)) throw config_error("dt must be positive", cfg.line_of("dt"));
  ec.T = cfg.get_double("T", gravity ? 1.825e6 : 10.0);
  if (!(ec.T > 0.0)) throw config_error("T must be positive", cfg.line_of("T"));

  ec.solver.tol_r = cfg.get_double("tol_r", many_body ? 1e-12 : 1e-10);
  ec.solver.tol_a = cfg.get_double("tol_a", 1e-15);
  if (!(ec.solver.tol_r > 0.0) || !(ec.solver.tol_a > 0.0))
    throw config_error("tol_r and tol_a must be positive");
  const long l_max = cfg.get_long("l_max", 20);
  if (l_max < 1 || l_max > 10000)
    throw config_error("l_max out of range [1, 10000]", cfg.line_of("l_max"));
  ec.solver.l_max = static_cast<int>(l_max);
  ec.solver.tol_q = cfg.get_double("tol_q", 1e-8);
  if (ec.solver.tol_q < 0.0) throw config_error("tol_q must be >= 0", cfg.line_of("tol_q"));
  ec.solver.prefer_stable_quotient = cfg.get_bool("stable_quotient", true);

  const long stride = cfg.get_long("sample_stride", ec.system == "solar" ? 50 : 1);
  if (stride < 1) throw config_error("sample_stride must be >= 1", cfg.line_of("sample_stride"));
  ec.sample_stride = static_cast<std::size_t>(stride);

  ec.bodies_file = cfg.get_string("bodies_file", ec.system == "solar" ? "data/solar_de430.txt" : "");
  if (gravity && ec.bodies_file.empty())
    throw config_error("system " + ec.system + " requires bodies_file");
  ec.invariants_out = cfg.get_string("invariants_out", "");
  ec.trajectory_out = cfg.get_string("trajectory_out", "");

  cfg.reject_unused();
  return ec;
}

[[nodiscard]] inline ExperimentSetup make_experiment(const ExperimentConfig& ec) {
  if (ec.system == "neo-hookean-spring") return make_neo_hookean_spring();
  if (ec.system == "lj-pair") return make_lj_pair();
  return make_gravity_experiment(ec.bodies_file);
}

/// Outcome of one fixed-step run: the sampled trajectory, its invariant
/// drifts, and aggregate solver statistics.
struct RunResult {
  std::vector<PhaseState> trajectory;
  InvariantSeries invariants;
  double initial_energy = 0.0;
  std::size_t steps = 0;
  long switch_total = 0;
  int max_iterations = 0;
  long stalled_steps = 0;  // steps accepted at l_max (needs accept_after_l_max)
};

[[nodiscard]] inline RunResult run(const ExperimentConfig& ec) {
  const ExperimentSetup setup = make_experiment(ec);
  const std::size_t steps = detail::checked_steps(ec.T, ec.dt);

  RunResult result;
  result.initial_energy = total_energy(setup.system, setup.initial);
  result.steps = steps;
  result.trajectory.reserve(steps / ec.sample_stride + 2);
  result.trajectory.push_back(setup.initial);

  std::size_t i = 0;
  const PhaseState last = integrate_observe(
      setup.system, ec.integrator, setup.initial, ec.dt, steps, ec.solver,
      [&](const PhaseState& s, const StepReport& rep) {
        ++i;
        result.switch_total += rep.switch_count;
        result.max_iterations = std::max(result.max_iterations, rep.iterations);
        if (!rep.converged) ++result.stalled_steps;
        if (i % ec.sample_stride == 0 && i != steps) result.trajectory.push_back(s);
      });
  result.trajectory.push_back(last);
  result.invariants = invariant_series(result.trajectory, setup.system);

  if (!ec.invariants_out.empty()) write_invariants_csv(ec.invariants_out, result.invariants);
  if (!ec.trajectory_out.empty()) write_trajectory_csv(ec.trajectory_out, result.trajectory);
  return result;
}

/// Convergence rows plus the reference they were measured against.
struct ConvergeResult {
  std::vector<ConvergenceRow> rows;
  VerifiedReference reference;
};

/// Runs the step-size ladder of ec's system and integrator against an
/// extrapolated fine reference.  The reference is the expensive part, so it
/// can be cached in a plain-text file keyed by the exact setup.
[[nodiscard]] inline ConvergeResult converge(const ExperimentConfig& ec,
                                             const std::vector<double>& dt_list, double dt_fine,
                                             const std::string& cache_path = "") {
  const ExperimentSetup setup = make_experiment(ec);
  SolverConfig ref_cfg = ec.solver;
  ref_cfg.tol_r = std::min(ref_cfg.tol_r, 1e-12);

  const std::string key = ec.system +
                          (ec.bodies_file.empty() ? std::string() : "|" + ec.bodies_file) +
                          "|T=" + detail::g17(ec.T) + "|dt_fine=" + detail::g17(dt_fine);
  const auto compute = [&] {
    return verified_reference(setup.system, setup.initial, ec.T, dt_fine, ref_cfg);
  };
  VerifiedReference ref = cache_path.empty() ? compute() : cached_reference(cache_path, key, compute);

  std::vector<ConvergenceRow> rows =
      convergence_study(setup.system, ec.integrator, setup.initial, ec.T, dt_list, ref.state,
                        ec.solver);
  return {std::move(rows), std::move(ref)};
}

/// One cell of the switching-robustness sweep.
struct HybridRow {
  double tol_q = 0.0;
  RescueKind rescue = RescueKind::JanzMidpoint;
  double max_abs_dh = 0.0;  // max |H(t) - H(0)| over the run
  double max_dh = 0.0;      // largest signed H(t) - H(0): > 0 flags energy growth
  double final_dh = 0.0;    // H(T) - H(0)
  double max_rise = 0.0;    // largest single-step energy increase
  long switches = 0;        // rescue firings summed over all residual sweeps
  long stalled_steps = 0;   // steps that ran out of corrector updates
};

/// Sweeps the switching threshold against the rescue formula on ec's system.
/// The closed-form stable quotient is disabled so the raw difference quotient
/// (and therefore the switch) is actually exercised.  Cells run with
/// accept_after_l_max: a wide window can place a step where neither force
/// branch admits a self-consistent solution, and aborting there would hide
/// exactly the blow-up the sweep is meant to expose.  Stalled steps are
/// counted per cell; a trustworthy cell has zero.
[[nodiscard]] inline std::vector<HybridRow> hybrid_study(const ExperimentConfig& base,
                                                         const std::vector<double>& tol_q_list,
                                                         const std::vector<RescueKind>& rescues) {
  std::vector<HybridRow> rows;
  rows.reserve(tol_q_list.size() * rescues.size());
  for (const double tol_q : tol_q_list)
    for (const RescueKind rescue : rescues) {
      ExperimentConfig ec = base;
      ec.solver.tol_q = tol_q;
      ec.solver.rescue = rescue;
      ec.solver.prefer_stable_quotient = false;
      ec.solver.accept_after_l_max = true;
      ec.sample_stride = 1;
      ec.invariants_out.clear();
      ec.trajectory_out.clear();

      const RunResult rr = run(ec);
      HybridRow row;
      row.tol_q = tol_q;
      row.rescue = rescue;
      row.switches = rr.switch_total;
      row.stalled_steps = rr.stalled_steps;
      row.final_dh = rr.invariants.dH.back();
      for (const double dh : rr.invariants.dH) {
        row.max_abs_dh = std::max(row.max_abs_dh, std::fabs(dh));
        row.max_dh = std::max(row.max_dh, dh);
      }
      row.max_rise = monotonicity_report(rr.invariants, 0.0).max_rise;
      rows.push_back(row);
    }
  return rows;
}

}  // namespace splitdyn

#endif
