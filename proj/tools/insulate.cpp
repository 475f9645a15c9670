// insulate: run experiments and inspect meshes.
//   insulate run <config.json> [--levels k] [--mode uniform|adaptive] [--check] [--out dir]
//   insulate mesh <file> [--refine k] [--out file]
//   insulate generate <annulus|lshape1|lshape2|square> [--level k] --out file
// Exit codes: 0 success, 1 failed check, 2 input error, 3 numerical failure.
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "insulate/errors.hpp"
#include "insulate/experiments.hpp"

namespace {

using namespace insulate;

int cmd_run(const std::string& path, int levels, const std::string& mode, bool check, const std::string& out) {
  ExperimentConfig cfg = ExperimentConfig::from_file(path);
  if (levels >= 0) cfg.levels = levels;
  if (!mode.empty()) cfg.mode = mode;
  if (!out.empty()) cfg.output_dir = out;
  cfg.check = cfg.check || check;
  const ExperimentResult res = run_experiment(cfg);
  std::printf("%5s %9s %12s %12s %8s %14s %14s %4s\n", "level", "N", "error", "estimator", "eoc", "I", "D", "it");
  for (const LevelRecord& r : res.records)
    std::printf("%5d %9zu %12.4e %12.4e %8.3f %14.8f %14.8f %4d\n", r.level, r.N, r.error, r.eta2_A + r.eta2_B,
                r.eoc, r.primal_energy, r.dual_energy, r.iterations);
  for (const CheckResult& c : res.checks)
    std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  return (cfg.check && !res.all_passed()) ? 1 : 0;
}

void print_stats(const Triangulation& m) {
  std::printf("vertices %zu elements %zu sides %zu boundary %zu (I %zu, D %zu, N %zu)\n", m.num_vertices(),
              m.num_elements(), m.num_sides(), m.boundary_sides().size(),
              m.sides_with(BoundaryLabel::Insulated).size(), m.sides_with(BoundaryLabel::Dirichlet).size(),
              m.sides_with(BoundaryLabel::Neumann).size());
  std::printf("area %.15g  h %.6g  max diameter %.6g  min angle %.4f deg\n", m.domain_area(), m.mesh_size(),
              m.max_diameter(), m.min_angle() * 180.0 / M_PI);
}

int cmd_mesh(const std::string& path, int refine, const std::string& out) {
  Triangulation m = read_mesh_file(path);
  for (int k = 0; k < refine; ++k) m = uniform_refine(m);
  print_stats(m);
  if (!out.empty()) write_mesh_file(out, m);
  return 0;
}

int cmd_generate(const std::string& kind, int level, const std::string& out) {
  Triangulation m = [&] {
    if (kind == "annulus") return generate_annulus(level);
    if (kind == "lshape1") return generate_lshape(level, LShapeSetup::AllInsulated);
    if (kind == "lshape2") return generate_lshape(level, LShapeSetup::MixedBoundary);
    if (kind == "square") return generate_square(1 << level);
    throw InputError("unknown mesh kind \"" + kind + "\"");
  }();
  print_stats(m);
  if (!out.empty()) write_mesh_file(out, m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal insulation solver"};
  app.require_subcommand(1);

  std::string config, mode, out;
  int levels = -1;
  bool check = false;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config, "config file")->required();
  run->add_option("--levels", levels, "override the level count");
  run->add_option("--mode", mode, "uniform or adaptive")->check(CLI::IsMember({"uniform", "adaptive"}));
  run->add_flag("--check", check, "exit 1 if an acceptance check fails");
  run->add_option("--out", out, "output directory");

  std::string mesh_file, mesh_out;
  int refine = 0;
  auto* mesh = app.add_subcommand("mesh", "validate and optionally refine a mesh file");
  mesh->add_option("file", mesh_file, "mesh file")->required();
  mesh->add_option("--refine", refine, "uniform refinements");
  mesh->add_option("--out", mesh_out, "write the result");

  std::string kind, gen_out;
  int level = 0;
  auto* gen = app.add_subcommand("generate", "write a built-in mesh");
  gen->add_option("kind", kind, "annulus | lshape1 | lshape2 | square")->required();
  gen->add_option("--level", level, "refinement level");
  gen->add_option("--out", gen_out, "mesh file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*run) return cmd_run(config, levels, mode, check, out);
    if (*mesh) return cmd_mesh(mesh_file, refine, mesh_out);
    if (*gen) return cmd_generate(kind, level, gen_out);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
