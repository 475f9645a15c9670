#include "insulate/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "insulate/errors.hpp"
#include "insulate/functionals.hpp"
#include "insulate/kernels.hpp"

namespace insulate {
namespace {

double inf_norm(std::span<const double> v) { return kernels::active().max_abs(v.size(), v.data()); }

std::vector<double> insulated_trace(const KktSystem& sys, std::span<const double> Z) {
  const auto& ins = sys.mats.map.insulated;
  std::vector<double> t(ins.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = Z[ins[i]];
  return t;
}

std::string snapshot(const ActiveSets& s) {
  std::string out = "|A+|=" + std::to_string(s.count_plus()) + " |A-|=" + std::to_string(s.count_minus());
  std::string both;
  for (std::size_t i = 0; i < s.plus.size() && both.size() < 80; ++i)
    if (s.plus[i] && s.minus[i]) both += " " + std::to_string(i);
  if (!both.empty()) out += " in both:" + both;
  return out;
}

}  // namespace

KktIterate KktIterate::zero(const KktSystem& sys) {
  KktIterate it;
  it.Z.assign(sys.mats.map.num_dofs(), 0.0);
  it.U_bar.assign(sys.problem.mesh->num_elements(), 0.0);
  it.lambda_plus.assign(sys.mats.M_I.size(), 0.0);
  it.lambda_minus.assign(sys.mats.M_I.size(), 0.0);
  return it;
}

std::size_t ActiveSets::count_plus() const { return std::count(plus.begin(), plus.end(), 1); }
std::size_t ActiveSets::count_minus() const { return std::count(minus.begin(), minus.end(), 1); }

double KktResiduals::max() const {
  return std::max({stationarity_flux, feasibility, stationarity_mu, sign, constraint, complementarity});
}

ActiveSets compute_active_sets(std::span<const double> lambda_plus, std::span<const double> lambda_minus,
                               double mu, std::span<const double> trace, double alpha) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  const std::size_t n = trace.size();
  if (lambda_plus.size() != n || lambda_minus.size() != n) throw Error("compute_active_sets: size mismatch");
  ActiveSets s{std::vector<char>(n, 0), std::vector<char>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    s.plus[i] = lambda_plus[i] + alpha * (mu + trace[i]) < 0.0;
    s.minus[i] = lambda_minus[i] + alpha * (mu - trace[i]) < 0.0;
  }
  return s;
}

ActiveSets compute_active_sets(const KktIterate& it, const KktSystem& sys, double alpha) {
  const std::vector<double> t = insulated_trace(sys, it.Z);
  return compute_active_sets(it.lambda_plus, it.lambda_minus, it.mu, t, alpha);
}

// Unknowns and rows: [Z | U_bar | mu | L+ | L-].
NewtonSolver::NewtonSolver(const KktSystem& sys, double alpha) : sys_(sys), alpha_(alpha) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  const std::size_t nz = sys.mats.map.num_dofs(), ne = sys.problem.mesh->num_elements();
  const std::size_t ni = sys.mats.M_I.size();
  rhs_.assign(nz + ne + 1 + 2 * ni, 0.0);
  for (std::size_t i = 0; i < nz; ++i) rhs_[i] = sys.vecs.U_D[i] - sys.vecs.Z_g[i];
  for (std::size_t t = 0; t < ne; ++t) rhs_[nz + t] = -sys.vecs.F_g[t];
}

SparseMatrix NewtonSolver::matrix(const ActiveSets& sets) const {
  const KktMatrices& k = sys_.mats;
  const std::size_t nz = k.map.num_dofs(), ne = sys_.problem.mesh->num_elements();
  const std::size_t ni = k.M_I.size();
  const std::size_t omu = nz + ne, op = omu + 1, om = op + ni, n = om + ni;
  std::vector<Triplet> t;
  t.reserve(k.A.nnz() + 2 * k.B.nnz() + 9 * ni + 1);
  for (const Triplet& e : k.A.triplets()) t.push_back(e);
  for (const Triplet& e : k.B.triplets()) {
    t.push_back({e.col, nz + e.row, e.value});
    t.push_back({nz + e.row, e.col, e.value});
  }
  t.push_back({omu, omu, sys_.problem.m});
  const double a = alpha_;
  for (std::size_t i = 0; i < ni; ++i) {
    const std::size_t d = k.map.insulated[i];
    const double len = k.M_I[i];
    t.push_back({d, op + i, len});
    t.push_back({d, om + i, -len});
    t.push_back({omu, op + i, len});
    t.push_back({omu, om + i, len});
    const bool ap = sets.plus[i], am = sets.minus[i];
    // active: -a z - a mu = 0 (A+), a z - a mu = 0 (A-); inactive: multiplier = 0
    t.push_back({op + i, d, ap ? -a : 0.0});
    t.push_back({op + i, omu, ap ? -a : 0.0});
    t.push_back({op + i, op + i, ap ? 0.0 : 1.0});
    t.push_back({om + i, d, am ? a : 0.0});
    t.push_back({om + i, omu, am ? -a : 0.0});
    t.push_back({om + i, om + i, am ? 0.0 : 1.0});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

KktIterate NewtonSolver::step(const ActiveSets& sets) {
  const std::size_t ni = sys_.mats.M_I.size();
  if (sets.plus.size() != ni || sets.minus.size() != ni) throw Error("newton_step: active sets have wrong size");
  const SparseMatrix M = matrix(sets);
  std::vector<double> x;
  try {
    if (!analyzed_) {
      lu_.analyze(M);
      analyzed_ = true;
    }
    lu_.factorize(M);
    x = lu_.solve(rhs_);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string(e.what()) + " [active sets " + snapshot(sets) + "]", e.pivot());
  }
  const std::size_t nz = sys_.mats.map.num_dofs(), ne = sys_.problem.mesh->num_elements();
  KktIterate it;
  it.Z.assign(x.begin(), x.begin() + nz);
  it.U_bar.assign(x.begin() + nz, x.begin() + nz + ne);
  it.mu = x[nz + ne];
  it.lambda_plus.assign(x.begin() + nz + ne + 1, x.begin() + nz + ne + 1 + ni);
  it.lambda_minus.assign(x.begin() + nz + ne + 1 + ni, x.end());
  return it;
}

KktIterate newton_step(const KktSystem& sys, const ActiveSets& sets, double alpha) {
  NewtonSolver ns(sys, alpha);
  return ns.step(sets);
}

KktResiduals verify_kkt(const KktIterate& it, const KktSystem& sys) {
  const KktMatrices& k = sys.mats;
  const std::size_t ni = k.M_I.size();
  KktResiduals r;
  std::vector<double> a = matvec(k.A, it.Z);
  const std::vector<double> btu = matvec(k.B.transpose(), it.U_bar);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += btu[i] - (sys.vecs.U_D[i] - sys.vecs.Z_g[i]);
  for (std::size_t i = 0; i < ni; ++i)
    a[k.map.insulated[i]] += k.M_I[i] * (it.lambda_plus[i] - it.lambda_minus[i]);
  r.stationarity_flux = inf_norm(a);
  std::vector<double> b = matvec(k.B, it.Z);
  for (std::size_t t = 0; t < b.size(); ++t) b[t] += sys.vecs.F_g[t];
  r.feasibility = inf_norm(b);
  double c = sys.problem.m * it.mu;
  for (std::size_t i = 0; i < ni; ++i) c += k.M_I[i] * (it.lambda_plus[i] + it.lambda_minus[i]);
  r.stationarity_mu = std::abs(c);
  for (std::size_t i = 0; i < ni; ++i) {
    const double z = it.Z[k.map.insulated[i]];
    const double gp = it.mu + z, gm = it.mu - z;
    r.sign = std::max({r.sign, it.lambda_plus[i], it.lambda_minus[i]});
    r.constraint = std::max({r.constraint, -gp, -gm});
    r.complementarity =
        std::max({r.complementarity, std::abs(it.lambda_plus[i] * gp), std::abs(it.lambda_minus[i] * gm)});
  }
  return r;
}

DualSolution solve_dual(const KktSystem& sys, const SolverOptions& opt) {
  if (!(opt.alpha > 0.0) || !(opt.eps_stop > 0.0) || opt.max_iter < 1)
    throw InputError("solver options need alpha > 0, eps_stop > 0, max_iter >= 1");
  DualSolution out{sys, Rt0Function(sys.problem.mesh), KktIterate::zero(sys), {}};
  const KktSystem& s = out.system;
  NewtonSolver newton(s, opt.alpha);
  SolverReport& rep = out.report;
  ActiveSets sets = compute_active_sets(out.iterate, s, opt.alpha);
  double prev_energy = -INFINITY;
  for (int k = 1; k <= opt.max_iter; ++k) {
    KktIterate next = newton.step(sets);
    std::vector<double> diff(next.Z.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = next.Z[i] - out.iterate.Z[i];
    const double step = inf_norm(diff);
    out.iterate = std::move(next);
    const Rt0Function z = flux_from_dofs(s, out.iterate.Z);
    const double energy = discrete_dual_energy(z, s.problem, /*check=*/false);
    rep.log.push_back({k, sets.count_plus(), sets.count_minus(), step, out.iterate.mu, energy});
    if (energy < prev_energy - 1e-12 * (1.0 + std::abs(prev_energy))) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "dual energy decreased at iteration %d (%.6e -> %.6e)", k, prev_energy, energy);
      rep.warnings.push_back(buf);
    }
    prev_energy = energy;
    rep.iterations = k;
    rep.final_step_norm = step;
    ActiveSets next_sets = compute_active_sets(out.iterate, s, opt.alpha);
    if (next_sets == sets) {
      rep.exact_termination = true;
      rep.converged = true;
      break;
    }
    if (step <= opt.eps_stop) {
      rep.converged = true;
      break;
    }
    sets = std::move(next_sets);
  }
  if (!rep.converged) rep.warnings.push_back("maximum number of iterations reached");
  out.z = flux_from_dofs(s, out.iterate.Z);
  rep.kkt_residuals = verify_kkt(out.iterate, s);
  return out;
}

DualSolution solve_dual(const MeshPtr& mesh, const ProblemData& data, const SolverOptions& opt) {
  return solve_dual(assemble(mesh, data), opt);
}

PwAffine marini_field(const Rt0Function& z, const PwConstScalar& u_bar) {
  if (u_bar.size() != z.mesh().num_elements()) throw Error("marini_reconstruct: u_bar has wrong length");
  return PwAffine{z.mesh_ptr(), u_bar, rt_piecewise_average(z)};
}

CrFunction marini_reconstruct(const Rt0Function& z, const PwConstScalar& u_bar, const DiscreteProblem* problem) {
  const PwAffine u = marini_field(z, u_bar);
  const Triangulation& mesh = z.mesh();
  std::vector<double> dof(mesh.num_sides());
  for (std::size_t s = 0; s < dof.size(); ++s) {
    const double a = u.side_mean(mesh.side_minus(s), s);
    if (mesh.is_boundary(s)) {
      dof[s] = a;
      continue;
    }
    const double b = u.side_mean(mesh.side_plus(s), s);
    if (std::abs(b - a) > 1e-9) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "Marini reconstruction jumps by %.3e on side %zu", b - a, s);
      throw JumpViolationError(buf, s, b - a);
    }
    dof[s] = 0.5 * (a + b);
  }
  if (problem)
    for (std::size_t s : mesh.sides_with(BoundaryLabel::Dirichlet))
      if (std::abs(dof[s] - problem->uD_h[s]) > 1e-9)
        throw InadmissibleError("Marini reconstruction misses the Dirichlet value on side " + std::to_string(s));
  return CrFunction(z.mesh_ptr(), std::move(dof));
}

void write_iteration_log(std::ostream& os, const SolverReport& report) {
  os << "k,n_plus,n_minus,step_norm,mu,dual_energy\n";
  char buf[160];
  for (const IterationRecord& r : report.log) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%zu,%.17g,%.17g,%.17g\n", r.k, r.n_plus, r.n_minus, r.step_norm, r.mu,
                  r.dual_energy);
    os << buf;
  }
}

}  // namespace insulate
