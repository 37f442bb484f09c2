#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <variant>

#include <splitdyn/harness/bodies.hpp>
#include <splitdyn/harness/config.hpp>
#include <splitdyn/harness/csv.hpp>
#include <splitdyn/harness/experiments.hpp>

using namespace splitdyn;

namespace {

std::string read_all(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_all(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  REQUIRE(out.good());
  out << text;
}

int config_error_line(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const config_error& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("config files parse keys, comments, and typed values") {
  Config cfg = Config::parse_string(
      "# a comment line\n"
      "system = lj-pair   # trailing comment\n"
      "\n"
      "dt = 2.5e-4\n"
      "l_max= 40\n"
      "stable_quotient =no\n");
  CHECK(cfg.get_string("system") == "lj-pair");
  CHECK(cfg.get_double("dt") == 2.5e-4);
  CHECK(cfg.get_long("l_max") == 40);
  CHECK(cfg.get_bool("stable_quotient") == false);
  CHECK(cfg.get_double("missing", 7.0) == 7.0);
  CHECK(cfg.get_string("missing", "x") == "x");
  CHECK(cfg.get_bool("missing", true) == true);
  CHECK(cfg.has("dt"));
  CHECK_FALSE(cfg.has("missing"));
  CHECK(cfg.line_of("dt") == 4);
  cfg.reject_unused();  // everything above was read
}

TEST_CASE("config diagnostics carry the offending line") {
  CHECK(config_error_line([] { (void)Config::parse_string("a = 1\nnonsense\n"); }) == 2);
  CHECK(config_error_line([] { (void)Config::parse_string("= 1\n"); }) == 1);
  CHECK(config_error_line([] { (void)Config::parse_string("a =\n"); }) == 1);
  CHECK(config_error_line([] { (void)Config::parse_string("a = 1\n\na = 2\n"); }) == 3);
  CHECK(config_error_line([] {
          Config cfg = Config::parse_string("dt = fast\n");
          (void)cfg.get_double("dt");
        }) == 1);
  CHECK(config_error_line([] {
          Config cfg = Config::parse_string("\n\nl_max = 3.5\n");
          (void)cfg.get_long("l_max");
        }) == 3);
  CHECK(config_error_line([] {
          Config cfg = Config::parse_string("flag = maybe\n");
          (void)cfg.get_bool("flag");
        }) == 1);
  CHECK(config_error_line([] {
          Config cfg = Config::parse_string("a = 1\nwat = 2\n");
          (void)cfg.get_double("a");
          cfg.reject_unused();
        }) == 2);
  CHECK_THROWS_AS(Config::parse_file("no_such_config_file.cfg"), config_error);

  // overrides layered with set() report line 0 (not from any file)
  Config cfg = Config::parse_string("dt = 1\n");
  cfg.set("dt", "2");
  CHECK(cfg.get_double("dt") == 2.0);
  CHECK(cfg.line_of("dt") == 0);
}

TEST_CASE("bodies files load, validate, and build the gravitating system") {
  const std::string good =
      "# two-body test file\n"
      "G = 1.5\n"
      "units = test units\n"
      "alpha 2.0  1 0 0  0 0.5 0\n"
      "beta  1.0  -2 0 0  0 -1 0\n";
  write_all("test_bodies_good.txt", good);
  const BodiesFile file = load_bodies("test_bodies_good.txt");
  CHECK(file.G == 1.5);
  CHECK(file.units == "test units");
  REQUIRE(file.bodies.size() == 2);
  CHECK(file.bodies[0].name == "alpha");
  CHECK(file.bodies[0].mass == 2.0);
  CHECK(file.bodies[1].q.x() == -2.0);

  const auto [spec, state] = make_gravity_system(file);
  CHECK(spec.particles() == 2);
  REQUIRE(std::holds_alternative<PairTable>(spec.interaction));
  const PairTable& table = std::get<PairTable>(spec.interaction);
  REQUIRE(table.bonds.size() == 1);
  // the bond strength is G m_a m_b: V(d) = -3/d here
  CHECK(table.bonds[0].potential.v(2.0) == Catch::Approx(-1.5).epsilon(1e-15));
  CHECK(table.bonds[0].potential.stable_quotient(1.0, 3.0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(state.q[1].x() == -2.0);
  CHECK(state.p[0].y() == 0.5);
  std::remove("test_bodies_good.txt");
}

TEST_CASE("malformed bodies files are rejected with line numbers") {
  const auto reject = [](const std::string& text) {
    write_all("test_bodies_bad.txt", text);
    int line = -1;
    try {
      (void)load_bodies("test_bodies_bad.txt");
    } catch (const config_error& e) {
      line = e.line;
    }
    std::remove("test_bodies_bad.txt");
    return line;
  };

  CHECK(reject("a 1 0 0 0 0 0 0\nb 1 1 0 0 0 0 0\n") == 0);       // no G header
  CHECK(reject("G = 0\na 1 0 0 0 0 0 0\n") == 1);                 // G not positive
  CHECK(reject("G = 1\nweird = 2\n") == 2);                       // unknown header
  CHECK(reject("G = 1\na 1 0 0 0 0 0\nb 1 1 0 0 0 0 0\n") == 2);  // short row
  CHECK(reject("G = 1\na 1 0 0 0 0 0 0 9\n") == 2);               // trailing token
  CHECK(reject("G = 1\na -1 0 0 0 0 0 0\n") == 2);                // negative mass
  CHECK(reject("G = 1\na 1 0 0 0 0 0 0\nG = 2\n") == 3);          // header after rows
  CHECK(reject("G = 1\nonly 1 0 0 0 0 0 0\n") == 0);              // fewer than two bodies
  CHECK_THROWS_AS(load_bodies("no_such_bodies_file.txt"), config_error);
}

TEST_CASE("the bundled planetary file matches its frozen summary") {
  const std::string path = std::string(SPLITDYN_DATA_DIR) + "/solar_de430.txt";
  const BodiesFile file = load_bodies(path);
  CHECK(file.G == 2.95912208286e-4);
  REQUIRE(file.bodies.size() == 10);
  CHECK(file.bodies[0].name == "sun");
  CHECK(file.bodies[0].mass == 1.0);

  const auto [spec, state] = make_gravity_system(file);
  CHECK(std::get<PairTable>(spec.interaction).bonds.size() == 45);
  CHECK(total_energy(spec, state) == Catch::Approx(-3.322590814249796e-08).epsilon(1e-12));
}

TEST_CASE("csv writers emit exact, deterministic bytes") {
  InvariantSeries series;
  series.times = {0.0, 0.5};
  series.dH = {0.0, -0.25};
  series.dJ = {Vec3(0, 0, 0), Vec3(1, 0, -2)};
  series.dL = {Vec3(0, 0, 0), Vec3(0, 0, 0)};
  series.dC = {Vec3(0, 0, 0), Vec3(0.125, 0, 0)};
  write_invariants_csv("test_inv.csv", series);
  CHECK(read_all("test_inv.csv") ==
        "time,dH,dJx,dJy,dJz,dLx,dLy,dLz,dCx,dCy,dCz\n"
        "0,0,0,0,0,0,0,0,0,0,0\n"
        "0.5,-0.25,1,0,-2,0,0,0,0.125,0,0\n");

  PhaseState s;
  s.time = 0.0;
  s.q = {Vec3(1, 2, 3)};
  s.p = {Vec3(-1, 0, 2.5)};
  write_trajectory_csv("test_traj.csv", {s});
  CHECK(read_all("test_traj.csv") ==
        "time,q0x,q0y,q0z,p0x,p0y,p0z\n"
        "0,1,2,3,-1,0,2.5\n");

  ConvergenceRow row;
  row.dt = 0.125;
  row.rel_err_q = 0.5;
  row.rel_err_p = 0.25;
  write_convergence_csv("test_conv.csv", {row});
  CHECK(read_all("test_conv.csv") ==
        "dt,rel_err_q,rel_err_p,order_q,order_p\n"
        "0.125,0.5,0.25,nan,nan\n");

  // identical inputs give byte-identical files
  write_invariants_csv("test_inv2.csv", series);
  CHECK(read_all("test_inv2.csv") == read_all("test_inv.csv"));
  for (const char* f : {"test_inv.csv", "test_inv2.csv", "test_traj.csv", "test_conv.csv"})
    std::remove(f);
}

TEST_CASE("experiment configuration applies per-system defaults") {
  SECTION("spring defaults") {
    Config cfg = Config::parse_string("");
    const ExperimentConfig ec = experiment_from_config(cfg);
    CHECK(ec.system == "neo-hookean-spring");
    CHECK(ec.integrator == IntegratorKind::LaBuddeGreenspan);
    CHECK(ec.dt == 1e-3);
    CHECK(ec.T == 10.0);
    CHECK(ec.solver.tol_r == 1e-10);
    CHECK(ec.solver.tol_q == 1e-8);
    CHECK(ec.solver.rescue == RescueKind::JanzMidpoint);
    CHECK(ec.solver.prefer_stable_quotient);
    CHECK(ec.sample_stride == 1);
  }
  SECTION("planetary defaults") {
    Config cfg = Config::parse_string("system = solar\n");
    const ExperimentConfig ec = experiment_from_config(cfg);
    CHECK(ec.dt == 5.0);
    CHECK(ec.T == 1.825e6);
    CHECK(ec.solver.tol_r == 1e-12);  // many-body runs default tighter
    CHECK(ec.sample_stride == 50);
    CHECK(ec.bodies_file == "data/solar_de430.txt");
  }
  SECTION("overrides and validation") {
    Config cfg = Config::parse_string(
        "system = lj-pair\nintegrator = perturbed-midpoint\nrescue = generalized-eyre\n"
        "dt = 1e-4\nT = 2\ntol_q = 0\nsample_stride = 10\n");
    const ExperimentConfig ec = experiment_from_config(cfg);
    CHECK(ec.integrator == IntegratorKind::PerturbedMidPoint);
    CHECK(ec.solver.rescue == RescueKind::GeneralizedEyre);
    CHECK(ec.solver.tol_q == 0.0);
    CHECK(ec.sample_stride == 10);

    Config bad_system = Config::parse_string("system = wat\n");
    CHECK(config_error_line([&] { (void)experiment_from_config(bad_system); }) == 1);
    Config bad_integrator = Config::parse_string("\nintegrator = rk4\n");
    CHECK(config_error_line([&] { (void)experiment_from_config(bad_integrator); }) == 2);
    Config bad_lmax = Config::parse_string("l_max = 0\n");
    CHECK_THROWS_AS(experiment_from_config(bad_lmax), config_error);
    Config bad_tolq = Config::parse_string("tol_q = -1\n");
    CHECK_THROWS_AS(experiment_from_config(bad_tolq), config_error);
    Config no_file = Config::parse_string("system = custom-file\n");
    CHECK_THROWS_AS(experiment_from_config(no_file), config_error);
    Config typo = Config::parse_string("dtt = 1e-3\n");
    CHECK_THROWS_AS(experiment_from_config(typo), config_error);
    Config bad_dt = Config::parse_string("dt = -1\n");
    CHECK_THROWS_AS(experiment_from_config(bad_dt), config_error);
  }
}

TEST_CASE("run results carry trajectories, drift, and solver statistics") {
  Config cfg = Config::parse_string("system = lj-pair\nT = 0.1\ndt = 1e-3\nsample_stride = 20\n");
  ExperimentConfig ec = experiment_from_config(cfg);
  ec.invariants_out = "test_run_inv.csv";
  const RunResult rr = run(ec);
  CHECK(rr.steps == 100);
  CHECK(rr.trajectory.size() == 7);  // initial + 5 strided + final
  CHECK(rr.initial_energy == Catch::Approx(-37.499988995073814).epsilon(1e-13));
  CHECK(rr.max_iterations >= 1);
  CHECK(rr.invariants.times.size() == rr.trajectory.size());
  const std::string csv = read_all("test_run_inv.csv");
  CHECK(csv.rfind("time,dH,", 0) == 0);
  std::remove("test_run_inv.csv");
}

// ---- end-to-end checks of the installed command-line tool ----------------

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SPLITDYN_CLI_PATH + "\" " + args +
                          " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli exits 0 on a successful run and writes the requested csv") {
  std::remove("e2e_inv.csv");
  CHECK(run_cli("run --system neo-hookean-spring --dt 1e-3 --T 0.1 --out e2e_inv.csv") == 0);
  const std::string csv = read_all("e2e_inv.csv");
  CHECK(csv.rfind("time,dH,", 0) == 0);
  std::remove("e2e_inv.csv");

  CHECK(run_cli("converge --system neo-hookean-spring --T 0.5 --dt-list 1e-2,5e-3 "
                "--ref-dt 1e-3") == 0);
  CHECK(run_cli("hybrid --system neo-hookean-spring --dt 1e-2 --T 0.1 "
                "--tol-q-list 1e-4 --rescue-list janz-midpoint") == 0);
}

TEST_CASE("cli exits 1 on configuration mistakes") {
  CHECK(run_cli("run --config no_such_file.cfg") == 1);
  CHECK(run_cli("run --integrator rk4") == 1);
  CHECK(run_cli("run --no-such-flag") == 1);
  CHECK(run_cli("run --system custom-file") == 1);  // missing bodies file
  write_all("e2e_bad.cfg", "dt = -3\n");
  CHECK(run_cli("run --config e2e_bad.cfg") == 1);
  std::remove("e2e_bad.cfg");
}

TEST_CASE("cli bodies-check inspects a file and exits by its validity") {
  const std::string solar = std::string(SPLITDYN_DATA_DIR) + "/solar_de430.txt";
  CHECK(run_cli("bodies-check \"" + solar + "\"") == 0);
  write_all("e2e_bodies_bad.txt", "G = 1\nonly 1 0 0 0 0 0 0\n");
  CHECK(run_cli("bodies-check e2e_bodies_bad.txt") == 1);
  std::remove("e2e_bodies_bad.txt");
}

TEST_CASE("cli exits 2 when the dynamics itself fails") {
  // two bodies at the same position: the first energy evaluation collapses
  write_all("e2e_bodies_singular.txt",
            "G = 1\na 1  0 0 0  0 0 0\nb 1  0 0 0  0 0 0\n");
  CHECK(run_cli("run --system custom-file --bodies-file e2e_bodies_singular.txt "
                "--dt 1 --T 1") == 2);
  std::remove("e2e_bodies_singular.txt");
}
