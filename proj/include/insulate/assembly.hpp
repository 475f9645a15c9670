#pragma once

#include <span>
#include <vector>

#include "insulate/fem_spaces.hpp"
#include "insulate/sparse.hpp"

namespace insulate {

// Continuous data. Empty functions mean zero.
struct ProblemData {
  double m = 1.0;
  ScalarFn f;
  ScalarFn g;
  ScalarFn u_D;
  // Element means of f use the composite rule on 4^f_depth subtriangles.
  int f_depth = 0;
};

// Piecewise-constant reductions f_h = Pi_h f, g_h = pi_h g, u_D^h = pi_h u_D.
// g_h and uD_h have one entry per side and are zero off their boundary part.
struct DiscreteProblem {
  MeshPtr mesh;
  double m = 1.0;
  PwConstScalar f_h;
  std::vector<double> g_h;
  std::vector<double> uD_h;
};

DiscreteProblem discretize(const MeshPtr& mesh, const ProblemData& data);

// Dual unknowns are the sides that are not Neumann, in increasing side order.
struct DofMap {
  std::vector<std::size_t> dof_side;
  std::vector<std::size_t> side_dof;   // npos on Neumann sides
  std::vector<std::size_t> insulated;  // insulated position -> dof
  std::vector<std::size_t> dirichlet;  // Dirichlet position -> dof
  std::size_t num_dofs() const { return dof_side.size(); }
};

struct KktMatrices {
  DofMap map;
  SparseMatrix A;            // dofs x dofs, (Pi_h psi_i, Pi_h psi_j)
  SparseMatrix B;            // elements x dofs, (div psi_j, 1)_T = sigma |S_j|
  std::vector<double> M_I;   // |S| per insulated position (diagonal of M_I and the row Mtilde_I)
  SparseMatrix T_I;          // insulated positions x dofs, selection
  SparseMatrix T_D;          // Dirichlet positions x dofs, selection
};

struct DataVectors {
  std::vector<double> F_g;  // per element (f_h + div z_g, 1)_T
  std::vector<double> Z_g;  // per dof (Pi_h z_g, Pi_h psi_i)
  std::vector<double> U_D;  // per dof |S| u_D^h on Dirichlet sides
  Rt0Function z_g;          // lifting: g_h on Neumann sides, zero elsewhere
};

struct KktSystem {
  DiscreteProblem problem;
  KktMatrices mats;
  DataVectors vecs;
};

KktSystem assemble(const DiscreteProblem& problem);
KktSystem assemble(const MeshPtr& mesh, const ProblemData& data);

// Total flux z_g + sum_i Z_i psi_i.
Rt0Function flux_from_dofs(const KktSystem& sys, std::span<const double> Z);
std::vector<double> dofs_from_flux(const KktSystem& sys, const Rt0Function& y);

struct CompatibilityDiagnostic {
  double residual = 0.0;  // ||B Z + F_g||_inf of the minimum-norm solution
  double insulated_measure = 0.0;
  std::size_t num_insulated = 0, num_dirichlet = 0, num_neumann = 0;
};

// Throws CompatibilityError when there is no insulated boundary or
// B Z = -F_g has no solution.
CompatibilityDiagnostic check_compatibility(const MeshPtr& mesh, const ProblemData& data);

}  // namespace insulate
