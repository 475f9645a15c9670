#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "insulate/functionals.hpp"
#include "insulate/solver.hpp"

namespace insulate {

struct AfemConfig {
  double theta_T = 0.25;
  double theta_S = 0.0;
  double eps_stop = 1e-12;
  int max_levels = 12;
  std::size_t max_elements = 0;  // stop once exceeded; 0 = no limit
  SolverOptions solver;
};

// Shortest prefix of the indicators sorted descending (ties: lower index
// first) whose sum reaches theta times the total.
std::vector<std::size_t> dorfler_mark(std::span<const double> eta, double theta);

// Everything computed on one mesh.
struct LevelResult {
  MeshPtr mesh;
  DiscreteProblem problem;
  DualSolution dual;
  CrFunction u_cr;           // Marini reconstruction
  P1Function u_bar;          // node average, Dirichlet values imposed
  GapReport discrete;        // (u_cr, z) with discrete energies
  GapReport report;          // (u_bar, z) with continuous energies, if the data allow it
  bool continuous = false;   // report holds continuous energies
};

struct LevelRecord {
  int level = 0;
  std::size_t elements = 0, vertices = 0, sides = 0, N = 0;
  double h = 0.0;
  double eta2_A = 0.0, eta2_B = 0.0;  // estimators of the reported pair
  double gap = 0.0;
  double primal_energy = 0.0;   // I(u_bar)
  double dual_energy = 0.0;     // D(z) if continuous, else D_h(z)
  double discrete_primal = 0.0, discrete_dual = 0.0;
  double error = 0.0;           // quantity whose rate is studied
  double apriori_rhs = NAN, apriori_mismatch = NAN, apriori_split_mismatch = NAN;
  int iterations = 0;
  bool exact_termination = false;
  double kkt_residual = 0.0;
  bool indicator_bound = true;  // 1/2 sum eta_A + sum eta_B <= gap + 1e-12
  std::size_t marked_elements = 0, marked_sides = 0;
  double eoc = NAN;
};

LevelResult solve_level(const MeshPtr& mesh, const ProblemData& data, const SolverOptions& opt);
LevelRecord summarize(const LevelResult& r, int level);

using LevelCallback = std::function<void(const LevelResult&, LevelRecord&)>;

// Solve, estimate, mark (theta_T on elements, theta_S on insulated sides),
// refine marked elements and the owners of marked sides.
std::vector<LevelRecord> afem_run(const MeshPtr& initial, const ProblemData& data, const AfemConfig& cfg,
                                  const LevelCallback& on_level = {});

// Fills LevelRecord::eoc from `error` against N.
void fill_eoc(std::vector<LevelRecord>& records);

}  // namespace insulate
