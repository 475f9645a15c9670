#pragma once

#include <string>
#include <vector>

#include "insulate/afem.hpp"

namespace insulate {

// u = C1 + C2 ln r + (ln r)^2 / 2 on 1/2 < r < 1 with m = 1, z = grad u, f = -1/r^2.
struct ManufacturedSolution {
  double C1 = 0.0, C2 = 0.0, m = 1.0, energy = 0.0;
  static ManufacturedSolution annulus();
  double u(Vec2 x) const;
  Vec2 z(Vec2 x) const;
  double f(Vec2 x) const;
};

struct ExperimentConfig {
  std::string experiment = "lshape_setup1";  // annulus_apriori | lshape_setup1 | lshape_setup2 | house
  std::string mode = "uniform";              // uniform | adaptive
  int first_level = 0;
  int levels = 4;                            // last level (uniform) or level budget (adaptive)
  double m = 3.0;
  SolverOptions solver;
  AfemConfig afem;
  int f_depth = 0;
  std::string output_dir;
  bool check = false;
  bool dump_solutions = true;

  // Unknown keys are rejected; missing keys keep the experiment defaults.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig defaults_for(const std::string& experiment);
  std::string to_json_text() const;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<LevelRecord> records;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Builds the problem data of a named experiment on the given mesh.
ProblemData experiment_data(const ExperimentConfig& cfg);
MeshPtr experiment_mesh(const ExperimentConfig& cfg, int level);

// Throws InputError for unknown or out-of-scope experiments.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Log-log ready columns; header only for an empty list.
void emit_plotdata(const std::vector<LevelRecord>& records, const std::string& path);
void write_level_log(const std::vector<LevelRecord>& records, const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t column(const std::string& name) const;
};
CsvTable read_csv_table(const std::string& path);

}  // namespace insulate
