#include "insulate/afem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "insulate/errors.hpp"

namespace insulate {

std::vector<std::size_t> dorfler_mark(std::span<const double> eta, double theta) {
  if (!(theta >= 0.0) || theta >= 1.0 + 1e-15) throw InputError("Dorfler parameter must lie in [0,1)");
  for (double e : eta)
    if (!(e >= 0.0)) throw InputError("Dorfler marking needs nonnegative indicators");
  std::vector<std::size_t> idx(eta.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (theta == 0.0 || eta.empty()) return {};
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return eta[a] > eta[b]; });
  const double total = std::accumulate(eta.begin(), eta.end(), 0.0);
  const double goal = theta * total;
  double sum = 0.0;
  std::size_t k = 0;
  while (k < idx.size() && sum < goal) sum += eta[idx[k++]];
  idx.resize(k);
  return idx;
}

LevelResult solve_level(const MeshPtr& mesh, const ProblemData& data, const SolverOptions& opt) {
  DualSolution dual = solve_dual(mesh, data, opt);
  const DiscreteProblem& p = dual.system.problem;
  CrFunction u_cr = marini_reconstruct(dual.z, dual.iterate.U_bar, &p);
  P1Function u_bar = mesh->sides_with(BoundaryLabel::Dirichlet).empty() ? node_average(u_cr)
                                                                         : node_average(u_cr, p.uD_h);
  GapReport discrete = gap_report(u_cr, dual.z, p);
  const bool continuous = data_is_piecewise_constant(*mesh, data);
  GapReport report = continuous ? gap_report(u_bar, dual.z, data) : discrete;
  if (!continuous) {
    report.primal_energy = continuous_primal_energy(u_bar, data);
    report.gap = report.primal_energy - report.dual_energy;
  }
  return LevelResult{mesh, p, std::move(dual), std::move(u_cr), std::move(u_bar), std::move(discrete),
                     std::move(report), continuous};
}

LevelRecord summarize(const LevelResult& r, int level) {
  const Triangulation& mesh = *r.mesh;
  LevelRecord rec;
  rec.level = level;
  rec.elements = mesh.num_elements();
  rec.vertices = mesh.num_vertices();
  rec.sides = mesh.num_sides();
  rec.N = rec.sides + rec.elements;
  rec.h = mesh.mesh_size();
  rec.eta2_A = r.report.eta2_A_global;
  rec.eta2_B = r.report.eta2_B_global;
  rec.primal_energy = r.report.primal_energy;
  rec.dual_energy = r.report.dual_energy;
  rec.gap = r.report.gap;
  rec.discrete_primal = r.discrete.primal_energy;
  rec.discrete_dual = r.discrete.dual_energy;
  rec.error = rec.gap;
  rec.iterations = r.dual.report.iterations;
  rec.exact_termination = r.dual.report.exact_termination;
  rec.kkt_residual = r.dual.report.kkt_residuals.max();
  rec.indicator_bound = rec.eta2_A + rec.eta2_B <= rec.gap + 1e-12;
  return rec;
}

std::vector<LevelRecord> afem_run(const MeshPtr& initial, const ProblemData& data, const AfemConfig& cfg,
                                  const LevelCallback& on_level) {
  if (cfg.theta_T < 0.0 || cfg.theta_T >= 1.0 || cfg.theta_S < 0.0 || cfg.theta_S >= 1.0)
    throw InputError("marking parameters must lie in [0,1)");
  if (!(cfg.eps_stop > 0.0)) throw InputError("eps_stop must be positive");
  std::vector<LevelRecord> out;
  MeshPtr mesh = initial;
  for (int k = 0; k < cfg.max_levels; ++k) {
    LevelResult res = [&] {
      try {
        return solve_level(mesh, data, cfg.solver);
      } catch (const Error& e) {
        throw Error("level " + std::to_string(k) + ": " + e.what());
      }
    }();
    LevelRecord rec = summarize(res, k);
    const bool done = rec.eta2_A + rec.eta2_B <= cfg.eps_stop || k + 1 == cfg.max_levels ||
                      (cfg.max_elements && mesh->num_elements() >= cfg.max_elements);
    std::vector<std::size_t> marked;
    if (!done) {
      marked = dorfler_mark(res.report.eta2_A_per_element, cfg.theta_T);
      const auto sides = dorfler_mark(res.report.eta2_B_per_side, cfg.theta_S);
      rec.marked_elements = marked.size();
      rec.marked_sides = sides.size();
      for (std::size_t i : sides) marked.push_back(mesh->side_minus(res.report.sides[i]));
      std::sort(marked.begin(), marked.end());
      marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
    }
    if (on_level) on_level(res, rec);
    out.push_back(rec);
    if (done || marked.empty()) break;
    mesh = std::make_shared<const Triangulation>(refine_nvb(*mesh, marked));
  }
  fill_eoc(out);
  return out;
}

void fill_eoc(std::vector<LevelRecord>& records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    const LevelRecord &a = records[i - 1], &b = records[i];
    if (a.error > 0.0 && b.error > 0.0 && b.N != a.N)
      records[i].eoc = std::log(b.error / a.error) / std::log(double(b.N) / double(a.N));
  }
}

}  // namespace insulate
