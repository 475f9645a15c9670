#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "insulate/errors.hpp"
#include "insulate/experiments.hpp"

using namespace insulate;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("insulate_harness_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

// Richardson-extrapolated central difference, O(h^4).
template <class F>
double derivative(F&& g, double x) {
  const double h = 1e-3;
  const auto d = [&](double s) { return (g(x + s) - g(x - s)) / (2.0 * s); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("INSULATE_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "INSULATE_CLI is not set");
  const std::string cmd = std::string(cli) + " " + args + " > " + (scratch_dir() / "cli.log").string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("manufactured annulus solution") {
  const ManufacturedSolution s = ManufacturedSolution::annulus();
  const double l2 = std::log(2.0);
  CHECK(s.C2 == Approx(2.0 * l2 / 3.0));
  CHECK(s.C1 == Approx(l2 * std::log(8.0) / 54.0 - std::log(64.0) / (27.0 * M_PI)));
  CHECK(s.energy == Approx(-0.2230149).epsilon(1e-6));
  CHECK(s.m == 1.0);
  for (double r : {0.5, 0.6, 0.75, 0.9, 1.0})
    for (double phi : {0.0, 0.7, 2.0, 4.5}) {
      const Vec2 x{r * std::cos(phi), r * std::sin(phi)};
      const Vec2 z = s.z(x);
      // z = grad u
      CHECK(std::abs(z.x - derivative([&](double t) { return s.u({t, x.y}); }, x.x)) <= 1e-10);
      CHECK(std::abs(z.y - derivative([&](double t) { return s.u({x.x, t}); }, x.y)) <= 1e-10);
      // div z = -f
      const double div = derivative([&](double t) { return s.z({t, x.y}).x; }, x.x) +
                         derivative([&](double t) { return s.z({x.x, t}).y; }, x.y);
      CHECK(std::abs(div + s.f(x)) <= 1e-9);
      CHECK(s.f(x) == Approx(-1.0 / (r * r)));
    }
}

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const auto c = ExperimentConfig::from_json_text(R"({"experiment": "lshape_setup2"})");
    CHECK(c.m == 3.0);
    CHECK(c.mode == "uniform");
    CHECK(c.solver.alpha == 1.0);
    CHECK(c.afem.theta_T == 0.25);
    const auto a = ExperimentConfig::from_json_text(R"({"experiment": "annulus_apriori"})");
    CHECK(a.m == 1.0);
    CHECK(a.first_level == 1);
  }
  SUBCASE("values and round trip") {
    const auto c = ExperimentConfig::from_json_text(
        R"({"experiment": "lshape_setup1", "mode": "adaptive", "levels": 9, "m": 2.5,
            "solver": {"alpha": 2, "max_iter": 7}, "afem": {"theta_T": 0.125, "theta_S": 0.125}})");
    CHECK(c.mode == "adaptive");
    CHECK(c.levels == 9);
    CHECK(c.m == 2.5);
    CHECK(c.solver.alpha == 2.0);
    CHECK(c.solver.max_iter == 7);
    CHECK(c.afem.theta_S == 0.125);
    const auto back = ExperimentConfig::from_json_text(c.to_json_text());
    CHECK(back.to_json_text() == c.to_json_text());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"experiment": "lshape_setup1", "colour": 1})"), InputError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"experiment": "lshape_setup1", "solver": {"tol": 1}})"),
                    InputError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"mode": "uniform"})"), InputError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"experiment": "lshape_setup1", "levels": "x"})"), InputError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{"), InputError);
    CHECK_THROWS_AS(ExperimentConfig::from_file((scratch_dir() / "missing.json").string()), InputError);
  }
  SUBCASE("out-of-scope and invalid experiments") {
    ExperimentConfig house = ExperimentConfig::defaults_for("house");
    CHECK_THROWS_AS(run_experiment(house), InputError);
    ExperimentConfig bad = ExperimentConfig::defaults_for("lshape_setup1");
    bad.m = -1.0;
    CHECK_THROWS_AS(run_experiment(bad), InputError);
    ExperimentConfig ann = ExperimentConfig::defaults_for("annulus_apriori");
    ann.mode = "adaptive";
    CHECK_THROWS_AS(run_experiment(ann), InputError);
  }
}

TEST_CASE("run_experiment writes tables that read back") {
  ExperimentConfig c = ExperimentConfig::defaults_for("lshape_setup1");
  c.levels = 2;
  c.output_dir = (scratch_dir() / "run").string();
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.records.size() == 3);
  CHECK(r.all_passed());
  const CsvTable t = read_csv_table(c.output_dir + "/convergence.csv");
  REQUIRE(t.rows.size() == 3);
  const std::size_t iN = t.column("N"), ig = t.column("gap");
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(t.rows[k][iN] == static_cast<double>(r.records[k].N));
    CHECK(t.rows[k][ig] == r.records[k].gap);
  }
  CHECK(fs::exists(c.output_dir + "/levels.csv"));
  CHECK(fs::exists(c.output_dir + "/summary.json"));
}

TEST_CASE("emit_plotdata") {
  SUBCASE("empty list writes the header only") {
    const std::string p = (scratch_dir() / "empty.csv").string();
    emit_plotdata({}, p);
    const CsvTable t = read_csv_table(p);
    CHECK(t.rows.empty());
    CHECK(t.column("N") < t.header.size());
    CHECK(t.column("error") < t.header.size());
  }
  SUBCASE("two levels round trip") {
    std::vector<LevelRecord> recs(2);
    recs[0].level = 0;
    recs[0].N = 12;
    recs[0].error = 0.1;
    recs[0].primal_energy = -0.123456789012345;
    recs[1].level = 1;
    recs[1].N = 48;
    recs[1].error = 0.025;
    recs[1].eoc = -1.0;
    const std::string p = (scratch_dir() / "two.csv").string();
    emit_plotdata(recs, p);
    const CsvTable t = read_csv_table(p);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][t.column("N")] == 12.0);
    CHECK(t.rows[1][t.column("error")] == 0.025);
    CHECK(t.rows[0][t.column("primal_energy")] == -0.123456789012345);
    CHECK(std::isnan(t.rows[0][t.column("eoc")]));
    CHECK(t.rows[1][t.column("eoc")] == -1.0);
  }
  SUBCASE("unknown column") {
    CsvTable t;
    CHECK_THROWS_AS(t.column("nope"), Error);
  }
}

TEST_CASE("command line exit codes") {
  const std::string ok = write_file("ok.json", R"({"experiment": "lshape_setup1", "levels": 1})");
  CHECK(run_cli("run " + ok + " --check") == 0);
  CHECK(run_cli("run " + ok + " --levels 0 --out " + (scratch_dir() / "cli_out").string()) == 0);
  CHECK(fs::exists(scratch_dir() / "cli_out" / "convergence.csv"));
  // one Newton step cannot stabilize the active sets, so the solver check fails
  const std::string capped =
      write_file("capped.json", R"({"experiment": "lshape_setup1", "levels": 1, "solver": {"max_iter": 1}})");
  CHECK(run_cli("run " + capped) == 0);
  CHECK(run_cli("run " + capped + " --check") == 1);
  CHECK(run_cli("run " + write_file("house.json", R"({"experiment": "house"})")) == 2);
  CHECK(run_cli("run " + write_file("typo.json", R"({"experiment": "lshape_setup1", "lvls": 2})")) == 2);
  CHECK(run_cli("run " + ok + " --mode sideways") == 2);
  CHECK(run_cli("run " + (scratch_dir() / "absent.json").string()) == 2);
  CHECK(run_cli("") == 2);
  const std::string mesh = (scratch_dir() / "l.mesh").string();
  CHECK(run_cli("generate lshape2 --level 1 --out " + mesh) == 0);
  CHECK(run_cli("mesh " + mesh + " --refine 1") == 0);
  CHECK(run_cli("mesh " + write_file("bad.mesh", "garbage\n")) == 2);
}
