// Command-line harness around the splitdyn library: deterministic runs of the
// bundled experiments, convergence studies against extrapolated references,
// quotient-switching sweeps, and bodies-file validation.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <splitdyn/splitdyn.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

[[nodiscard]] std::string g17(double x) { return splitdyn::detail::g17(x); }

struct CommonFlags {
  std::string config_path;
  std::string system;
  std::string integrator;
  std::string rescue;
  std::string bodies_file;
  double dt = 0.0;
  double big_t = 0.0;
  double tol_q = -1.0;

  CLI::App* add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value experiment file");
    cmd->add_option("--system", system,
                    "neo-hookean-spring, lj-pair, solar, or custom-file");
    cmd->add_option("--integrator", integrator,
                    "mid-point, labudde-greenspan, generalized-eyre, perturbed-midpoint, or "
                    "perturbed-trapezoidal");
    cmd->add_option("--rescue", rescue,
                    "quotient rescue: janz-midpoint, gonzalez-third-derivative, "
                    "generalized-eyre, perturbed-midpoint, or perturbed-trapezoidal");
    cmd->add_option("--bodies-file", bodies_file, "bodies file for solar/custom-file systems");
    cmd->add_option("--dt", dt, "time step");
    cmd->add_option("--T", big_t, "final time (must be a multiple of dt)");
    cmd->add_option("--tol-q", tol_q, "switch the difference quotient when |d1-d0| <= tol-q");
    return cmd;
  }

  [[nodiscard]] splitdyn::ExperimentConfig resolve(const CLI::App* cmd) const {
    // The config file provides the baseline; explicit flags are layered on
    // top, so one code path applies per-system defaults and validation.
    splitdyn::Config cfg = config_path.empty() ? splitdyn::Config::parse_string("")
                                               : splitdyn::Config::parse_file(config_path);
    if (cmd->count("--system")) cfg.set("system", system);
    if (cmd->count("--integrator")) cfg.set("integrator", integrator);
    if (cmd->count("--rescue")) cfg.set("rescue", rescue);
    if (cmd->count("--bodies-file")) cfg.set("bodies_file", bodies_file);
    if (cmd->count("--dt")) cfg.set("dt", g17(dt));
    if (cmd->count("--T")) cfg.set("T", g17(big_t));
    if (cmd->count("--tol-q")) cfg.set("tol_q", g17(tol_q));
    return splitdyn::experiment_from_config(cfg);
  }
};

void print_vec(const char* label, const splitdyn::Vec3& v) {
  std::printf("%-22s %s %s %s\n", label, g17(v[0]).c_str(), g17(v[1]).c_str(),
              g17(v[2]).c_str());
}

int cmd_run(const splitdyn::ExperimentConfig& ec) {
  const splitdyn::RunResult rr = splitdyn::run(ec);
  double max_abs_dh = 0.0;
  for (const double dh : rr.invariants.dH) max_abs_dh = std::max(max_abs_dh, std::fabs(dh));

  std::printf("%-22s %s\n", "system", ec.system.c_str());
  std::printf("%-22s %s\n", "integrator", to_string(ec.integrator));
  std::printf("%-22s %zu (dt = %s, T = %s)\n", "steps", rr.steps, g17(ec.dt).c_str(),
              g17(ec.T).c_str());
  std::printf("%-22s %s\n", "initial energy", g17(rr.initial_energy).c_str());
  std::printf("%-22s %s\n", "final dH", g17(rr.invariants.dH.back()).c_str());
  std::printf("%-22s %s\n", "max |dH|", g17(max_abs_dh).c_str());
  print_vec("final dJ", rr.invariants.dJ.back());
  print_vec("final dL", rr.invariants.dL.back());
  print_vec("final dC", rr.invariants.dC.back());
  std::printf("%-22s %ld\n", "rescue switches", rr.switch_total);
  std::printf("%-22s %d\n", "max newton updates", rr.max_iterations);
  if (!ec.invariants_out.empty())
    std::printf("%-22s %s\n", "invariants csv", ec.invariants_out.c_str());
  if (!ec.trajectory_out.empty())
    std::printf("%-22s %s\n", "trajectory csv", ec.trajectory_out.c_str());
  return kExitOk;
}

int cmd_converge(const splitdyn::ExperimentConfig& ec, const std::vector<double>& dt_list,
                 double dt_fine, const std::string& cache, const std::string& out_csv) {
  const splitdyn::ConvergeResult res = splitdyn::converge(ec, dt_list, dt_fine, cache);
  std::printf("reference: dt_fine = %s, pair gap q = %s, p = %s\n", g17(dt_fine).c_str(),
              g17(res.reference.rel_gap_q).c_str(), g17(res.reference.rel_gap_p).c_str());
  std::printf("%14s %14s %14s %8s %8s\n", "dt", "rel_err_q", "rel_err_p", "order_q", "order_p");
  for (const splitdyn::ConvergenceRow& row : res.rows)
    std::printf("%14.6g %14.6g %14.6g %8.3f %8.3f\n", row.dt, row.rel_err_q, row.rel_err_p,
                row.order_q, row.order_p);
  if (!out_csv.empty()) splitdyn::write_convergence_csv(out_csv, res.rows);
  return kExitOk;
}

int cmd_hybrid(const splitdyn::ExperimentConfig& ec, const std::vector<double>& tol_q_list,
               const std::vector<std::string>& rescue_names, const std::string& out_csv) {
  std::vector<splitdyn::RescueKind> rescues;
  rescues.reserve(rescue_names.size());
  for (const std::string& name : rescue_names) rescues.push_back(splitdyn::parse_rescue(name));

  const std::vector<splitdyn::HybridRow> rows = splitdyn::hybrid_study(ec, tol_q_list, rescues);
  std::printf("%10s %-28s %14s %14s %14s %14s %10s %8s\n", "tol_q", "rescue", "max|dH|", "max dH",
              "final dH", "max rise", "switches", "stalled");
  for (const splitdyn::HybridRow& row : rows)
    std::printf("%10.3g %-28s %14.6g %14.6g %14.6g %14.6g %10ld %8ld\n", row.tol_q,
                to_string(row.rescue), row.max_abs_dh, row.max_dh, row.final_dh, row.max_rise,
                row.switches, row.stalled_steps);

  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + out_csv);
    out << "tol_q,rescue,max_abs_dH,max_dH,final_dH,max_rise,switches,stalled_steps\n";
    for (const splitdyn::HybridRow& row : rows)
      out << g17(row.tol_q) << ',' << to_string(row.rescue) << ',' << g17(row.max_abs_dh) << ','
          << g17(row.max_dh) << ',' << g17(row.final_dh) << ',' << g17(row.max_rise) << ','
          << row.switches << ',' << row.stalled_steps << '\n';
  }
  return kExitOk;
}

int cmd_bodies_check(const std::string& path) {
  const splitdyn::BodiesFile file = splitdyn::load_bodies(path);
  auto [spec, state] = splitdyn::make_gravity_system(file);

  std::printf("%-22s %s\n", "file", path.c_str());
  std::printf("%-22s %s\n", "G", g17(file.G).c_str());
  std::printf("%-22s %s\n", "units", file.units.c_str());
  std::printf("%-22s %zu\n", "bodies", file.bodies.size());
  for (const splitdyn::BodyRecord& body : file.bodies)
    std::printf("  %-12s mass %s  |q| %s  |p| %s\n", body.name.c_str(), g17(body.mass).c_str(),
                g17(body.q.norm()).c_str(), g17(body.p.norm()).c_str());
  std::printf("%-22s %s\n", "total energy", g17(splitdyn::total_energy(spec, state)).c_str());
  print_vec("angular momentum", splitdyn::angular_momentum(state));
  print_vec("linear momentum", splitdyn::linear_momentum(state));
  print_vec("center of mass", splitdyn::center_of_mass(spec, state));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving integrators for point-mass dynamics"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd = run_flags.add_to(app.add_subcommand("run", "integrate one experiment"));
  std::string run_out, run_traj_out;
  long run_stride = 0;
  run_cmd->add_option("--out", run_out, "write the invariant series CSV here");
  run_cmd->add_option("--trajectory-out", run_traj_out, "write the sampled trajectory CSV here");
  run_cmd->add_option("--sample-stride", run_stride, "keep every n-th step in the outputs");

  CommonFlags conv_flags;
  CLI::App* conv_cmd =
      conv_flags.add_to(app.add_subcommand("converge", "endpoint error versus step size"));
  std::vector<double> conv_dt_list;
  double conv_ref_dt = 0.0;
  std::string conv_cache, conv_out;
  conv_cmd->add_option("--dt-list", conv_dt_list, "step sizes to test")
      ->required()
      ->delimiter(',');
  conv_cmd->add_option("--ref-dt", conv_ref_dt, "fine step for the extrapolated reference")
      ->required();
  conv_cmd->add_option("--ref-cache", conv_cache, "plain-text cache file for the reference");
  conv_cmd->add_option("--out", conv_out, "write the convergence table CSV here");

  CommonFlags hyb_flags;
  CLI::App* hyb_cmd =
      hyb_flags.add_to(app.add_subcommand("hybrid", "switching-threshold robustness sweep"));
  std::vector<double> hyb_tol_list{1e-1, 1e-4, 1e-8};
  std::vector<std::string> hyb_rescues{"janz-midpoint", "perturbed-midpoint",
                                       "perturbed-trapezoidal"};
  std::string hyb_out;
  hyb_cmd->add_option("--tol-q-list", hyb_tol_list, "switching thresholds to sweep")
      ->delimiter(',');
  hyb_cmd->add_option("--rescue-list", hyb_rescues, "rescue formulas to sweep")->delimiter(',');
  hyb_cmd->add_option("--out", hyb_out, "write the sweep table CSV here");

  CLI::App* bodies_cmd = app.add_subcommand("bodies-check", "validate and summarize a bodies file");
  std::string bodies_path;
  bodies_cmd->add_option("file", bodies_path, "bodies file to check")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run_cmd->parsed()) {
      splitdyn::ExperimentConfig ec = run_flags.resolve(run_cmd);
      if (run_cmd->count("--out")) ec.invariants_out = run_out;
      if (run_cmd->count("--trajectory-out")) ec.trajectory_out = run_traj_out;
      if (run_cmd->count("--sample-stride")) {
        if (run_stride < 1) throw splitdyn::config_error("sample-stride must be >= 1");
        ec.sample_stride = static_cast<std::size_t>(run_stride);
      }
      return cmd_run(ec);
    }
    if (conv_cmd->parsed()) {
      const splitdyn::ExperimentConfig ec = conv_flags.resolve(conv_cmd);
      if (!(conv_ref_dt > 0.0)) throw splitdyn::config_error("ref-dt must be positive");
      for (const double dt : conv_dt_list)
        if (!(dt > 0.0)) throw splitdyn::config_error("dt-list entries must be positive");
      return cmd_converge(ec, conv_dt_list, conv_ref_dt, conv_cache, conv_out);
    }
    if (hyb_cmd->parsed()) {
      const splitdyn::ExperimentConfig ec = hyb_flags.resolve(hyb_cmd);
      for (const double tol : hyb_tol_list)
        if (tol < 0.0) throw splitdyn::config_error("tol-q-list entries must be >= 0");
      return cmd_hybrid(ec, hyb_tol_list, hyb_rescues, hyb_out);
    }
    if (bodies_cmd->parsed()) return cmd_bodies_check(bodies_path);
  } catch (const splitdyn::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const splitdyn::step_failure& e) {
    std::fprintf(stderr, "step %zu failed: %s (|r| = %s after %d updates)\n", e.step_index,
                 e.what(), g17(e.report.final_residual).c_str(), e.report.iterations);
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}
