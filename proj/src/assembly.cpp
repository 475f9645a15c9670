#include "insulate/assembly.hpp"

#include <cmath>

#include "insulate/errors.hpp"

namespace insulate {

DiscreteProblem discretize(const MeshPtr& mesh, const ProblemData& data) {
  if (!(data.m > 0.0)) throw InputError("insulation mass m must be positive");
  DiscreteProblem p;
  p.mesh = mesh;
  p.m = data.m;
  p.f_h = data.f ? element_mean(data.f, *mesh, data.f_depth)
                 : PwConstScalar(mesh->num_elements(), 0.0);
  p.g_h.assign(mesh->num_sides(), 0.0);
  p.uD_h.assign(mesh->num_sides(), 0.0);
  if (data.g)
    for (std::size_t s : mesh->sides_with(BoundaryLabel::Neumann)) p.g_h[s] = side_mean_fn(data.g, *mesh, s);
  if (data.u_D)
    for (std::size_t s : mesh->sides_with(BoundaryLabel::Dirichlet))
      p.uD_h[s] = side_mean_fn(data.u_D, *mesh, s);
  return p;
}

KktSystem assemble(const DiscreteProblem& problem) {
  const Triangulation& mesh = *problem.mesh;
  const std::size_t ne = mesh.num_elements(), ns = mesh.num_sides();
  KktSystem sys{problem, {}, {{}, {}, {}, Rt0Function(problem.mesh)}};
  DofMap& map = sys.mats.map;
  map.side_dof.assign(ns, npos);
  for (std::size_t s = 0; s < ns; ++s) {
    if (mesh.has_label(s, BoundaryLabel::Neumann)) continue;
    map.side_dof[s] = map.dof_side.size();
    map.dof_side.push_back(s);
  }
  const std::size_t nd = map.num_dofs();
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Insulated)) {
    map.insulated.push_back(map.side_dof[s]);
    sys.mats.M_I.push_back(mesh.side_length(s));
  }
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Dirichlet)) map.dirichlet.push_back(map.side_dof[s]);

  std::vector<double>& zg = sys.vecs.z_g.dof();
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Neumann)) zg[s] = problem.g_h[s];

  std::vector<Triplet> ta, tb;
  ta.reserve(9 * ne);
  tb.reserve(3 * ne);
  sys.vecs.F_g.assign(ne, 0.0);
  sys.vecs.Z_g.assign(nd, 0.0);
  for (std::size_t t = 0; t < ne; ++t) {
    const auto& es = mesh.element_sides(t);
    const Element& e = mesh.element(t);
    const double area = mesh.area(t);
    const Vec2 xt = mesh.barycenter(t);
    Vec2 w[3];  // Pi_h psi_i on t
    Vec2 zbar;  // Pi_h z_g on t
    double divg = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double c = mesh.sigma(t, i) * mesh.side_length(es[i]);
      w[i] = (0.5 * c / area) * (xt - mesh.vertex(e[i]));
      zbar += zg[es[i]] * w[i];
      divg += c * zg[es[i]];
    }
    sys.vecs.F_g[t] = problem.f_h[t] * area + divg;
    for (int i = 0; i < 3; ++i) {
      const std::size_t di = map.side_dof[es[i]];
      if (di == npos) continue;
      tb.push_back({t, di, mesh.sigma(t, i) * mesh.side_length(es[i])});
      sys.vecs.Z_g[di] += area * dot(zbar, w[i]);
      for (int j = 0; j < 3; ++j) {
        const std::size_t dj = map.side_dof[es[j]];
        if (dj != npos) ta.push_back({di, dj, area * dot(w[i], w[j])});
      }
    }
  }
  sys.mats.A = SparseMatrix::from_triplets(nd, nd, std::move(ta));
  sys.mats.B = SparseMatrix::from_triplets(ne, nd, std::move(tb));

  std::vector<Triplet> ti, td;
  for (std::size_t k = 0; k < map.insulated.size(); ++k) ti.push_back({k, map.insulated[k], 1.0});
  for (std::size_t k = 0; k < map.dirichlet.size(); ++k) td.push_back({k, map.dirichlet[k], 1.0});
  sys.mats.T_I = SparseMatrix::from_triplets(map.insulated.size(), nd, std::move(ti));
  sys.mats.T_D = SparseMatrix::from_triplets(map.dirichlet.size(), nd, std::move(td));

  sys.vecs.U_D.assign(nd, 0.0);
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Dirichlet))
    sys.vecs.U_D[map.side_dof[s]] = mesh.side_length(s) * problem.uD_h[s];
  return sys;
}

KktSystem assemble(const MeshPtr& mesh, const ProblemData& data) { return assemble(discretize(mesh, data)); }

Rt0Function flux_from_dofs(const KktSystem& sys, std::span<const double> Z) {
  const DofMap& map = sys.mats.map;
  if (Z.size() != map.num_dofs()) throw Error("flux_from_dofs: wrong coefficient count");
  Rt0Function y = sys.vecs.z_g;
  for (std::size_t i = 0; i < Z.size(); ++i) y.dof()[map.dof_side[i]] += Z[i];
  return y;
}

std::vector<double> dofs_from_flux(const KktSystem& sys, const Rt0Function& y) {
  const DofMap& map = sys.mats.map;
  std::vector<double> Z(map.num_dofs());
  for (std::size_t i = 0; i < Z.size(); ++i) Z[i] = y[map.dof_side[i]] - sys.vecs.z_g[map.dof_side[i]];
  return Z;
}

CompatibilityDiagnostic check_compatibility(const MeshPtr& mesh, const ProblemData& data) {
  CompatibilityDiagnostic d;
  d.num_insulated = mesh->sides_with(BoundaryLabel::Insulated).size();
  d.num_dirichlet = mesh->sides_with(BoundaryLabel::Dirichlet).size();
  d.num_neumann = mesh->sides_with(BoundaryLabel::Neumann).size();
  for (std::size_t s : mesh->sides_with(BoundaryLabel::Insulated)) d.insulated_measure += mesh->side_length(s);
  const KktSystem sys = assemble(mesh, data);
  const SparseMatrix& B = sys.mats.B;
  std::vector<double> rhs(sys.vecs.F_g.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -sys.vecs.F_g[i];
  if (d.num_insulated == 0) {
    double total = 0.0;
    for (double v : sys.vecs.F_g) total += v;
    d.residual = d.num_dirichlet == 0 ? std::abs(total) : 0.0;
    throw CompatibilityError("no insulated boundary part", d.residual);
  }
  // minimum-norm solution Z = B^T w with B B^T w = -F_g
  const SparseMatrix Bt = B.transpose();
  std::vector<Triplet> bbt;
  for (std::size_t c = 0; c < Bt.rows(); ++c) {
    const auto& rp = Bt.row_ptr();
    for (std::int32_t a = rp[c]; a < rp[c + 1]; ++a)
      for (std::int32_t b = rp[c]; b < rp[c + 1]; ++b)
        bbt.push_back({static_cast<std::size_t>(Bt.col_idx()[a]), static_cast<std::size_t>(Bt.col_idx()[b]),
                       Bt.values()[a] * Bt.values()[b]});
  }
  const SparseMatrix BBt = SparseMatrix::from_triplets(B.rows(), B.rows(), std::move(bbt));
  std::vector<double> w;
  try {
    w = solve_direct(BBt, rhs);
  } catch (const SingularMatrixError&) {
    throw CompatibilityError("divergence constraint is not surjective", INFINITY);
  }
  const std::vector<double> Z = matvec(Bt, w);
  const std::vector<double> r = matvec(B, Z);
  for (std::size_t i = 0; i < r.size(); ++i) d.residual = std::max(d.residual, std::abs(r[i] - rhs[i]));
  double scale = 1.0;
  for (double v : rhs) scale = std::max(scale, std::abs(v));
  if (d.residual > 1e-10 * scale) throw CompatibilityError("inconsistent divergence constraint", d.residual);
  return d;
}

}  // namespace insulate
