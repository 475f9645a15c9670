#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "insulate/assembly.hpp"

namespace insulate {

struct KktIterate {
  std::vector<double> Z;      // shifted flux coefficients, one per dual dof
  std::vector<double> U_bar;  // one per element
  double mu = 0.0;
  std::vector<double> lambda_plus;   // one per insulated side
  std::vector<double> lambda_minus;

  static KktIterate zero(const KktSystem& sys);
};

struct ActiveSets {
  std::vector<char> plus;   // per insulated position
  std::vector<char> minus;
  std::size_t count_plus() const;
  std::size_t count_minus() const;
  bool operator==(const ActiveSets&) const = default;
};

struct SolverOptions {
  double alpha = 1.0;
  double eps_stop = 1e-10;
  int max_iter = 50;
};

struct IterationRecord {
  int k = 0;
  std::size_t n_plus = 0, n_minus = 0;
  double step_norm = 0.0;
  double mu = 0.0;
  double dual_energy = 0.0;
};

struct KktResiduals {
  double stationarity_flux = 0.0;  // A Z + B^T U + T_I^T M_I (L+ - L-) - (U_D - Z_g)
  double feasibility = 0.0;        // B Z + F_g
  double stationarity_mu = 0.0;    // m mu + Mtilde (L+ + L-)
  double sign = 0.0;               // max(L+-, 0)
  double constraint = 0.0;         // max(-(mu +- z.n), 0)
  double complementarity = 0.0;    // |L+- (mu +- z.n)|
  double max() const;
};

struct SolverReport {
  int iterations = 0;
  bool converged = false;
  bool exact_termination = false;
  double final_step_norm = 0.0;
  KktResiduals kkt_residuals;
  std::vector<IterationRecord> log;
  std::vector<std::string> warnings;
};

// i is active in A+ (A-) iff L+_i + alpha (mu + t_i) < 0 (L-_i + alpha (mu - t_i) < 0),
// t the insulated normal traces.
ActiveSets compute_active_sets(std::span<const double> lambda_plus, std::span<const double> lambda_minus,
                               double mu, std::span<const double> trace, double alpha);
ActiveSets compute_active_sets(const KktIterate& it, const KktSystem& sys, double alpha);

// Newton system for fixed active sets. Pattern is independent of the sets, so
// one symbolic analysis serves a whole solve.
class NewtonSolver {
 public:
  NewtonSolver(const KktSystem& sys, double alpha);
  KktIterate step(const ActiveSets& sets);

 private:
  SparseMatrix matrix(const ActiveSets& sets) const;
  const KktSystem& sys_;
  double alpha_;
  std::vector<double> rhs_;
  DirectSolver lu_;
  bool analyzed_ = false;
};

KktIterate newton_step(const KktSystem& sys, const ActiveSets& sets, double alpha);

KktResiduals verify_kkt(const KktIterate& it, const KktSystem& sys);

struct DualSolution {
  KktSystem system;
  Rt0Function z;  // total flux
  KktIterate iterate;
  SolverReport report;
};

// Algorithm: active sets from the current iterate, Newton solve, stop on a
// small step or when the active sets repeat.
DualSolution solve_dual(const KktSystem& sys, const SolverOptions& opt = {});
DualSolution solve_dual(const MeshPtr& mesh, const ProblemData& data, const SolverOptions& opt = {});

// u|_T = u_bar_T + (Pi_h z)|_T . (x - x_T); throws JumpViolationError when side
// means from the two neighbours differ by more than 1e-9. With `problem`,
// Dirichlet side means are checked against u_D^h.
CrFunction marini_reconstruct(const Rt0Function& z, const PwConstScalar& u_bar,
                              const DiscreteProblem* problem = nullptr);
PwAffine marini_field(const Rt0Function& z, const PwConstScalar& u_bar);

void write_iteration_log(std::ostream& os, const SolverReport& report);

}  // namespace insulate
