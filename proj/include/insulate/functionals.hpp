#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "insulate/assembly.hpp"

namespace insulate {

// Discrete energies. With check=true, inadmissible arguments throw
// InadmissibleError (Dirichlet mismatch for the primal; divergence or
// Neumann mismatch for the dual, tolerance 1e-10).
double discrete_primal_energy(const CrFunction& v, const DiscreteProblem& p, bool check = true);
double discrete_dual_energy(const Rt0Function& y, const DiscreteProblem& p, bool check = true);

// Continuous energies of conforming / H(div) candidates.
double continuous_primal_energy(const P1Function& v, const ProblemData& data);
// Requires f and g piecewise constant on the mesh with div y = -f, y.n = g.
double continuous_dual_energy(const Rt0Function& y, const ProblemData& data);

// Exact integral of |v| over a segment of length len with affine v from va to vb.
double abs_integral_affine(double va, double vb, double len);
// True if f (and g on Neumann sides) is constant per element (side) at the quadrature points.
bool data_is_piecewise_constant(const Triangulation& mesh, const ProblemData& data, double tol = 1e-12);

struct GapReport {
  std::vector<double> eta2_A_per_element;  // ||grad v - y||_T^2, unscaled
  std::vector<std::size_t> sides;          // insulated sides, order of the per-side arrays
  std::vector<double> eta2_B_per_side;     // (m a + b)^2 / (2m), a = y.n, b = int_S v
  std::vector<double> eta2_B_side_exact;   // m/2 a^2 + a int_S v + (int_S |v|)^2 / (2m)
  double eta2_A_global = 0.0;              // 1/2 sum of the element values
  double eta2_B_global = 0.0;              // sum of eta2_B_per_side
  double eta2_B_exact = 0.0;               // m/2 max a^2 + sum a int_S v + (sum int_S |v|)^2 / (2m)
  double primal_energy = 0.0;
  double dual_energy = 0.0;
  double gap = 0.0;
};

// Discrete pair: CR candidate and RT0 flux, discrete energies.
GapReport gap_report(const CrFunction& v, const Rt0Function& y, const DiscreteProblem& p);
// Conforming pair for the adaptive loop: continuous energies.
GapReport gap_report(const P1Function& v, const Rt0Function& y, const ProblemData& data);

// m/2 max a_S^2 + sum a_S b_S + (sum |b_S|)^2 / (2m) with b_S = |S| <v>_S.
double exact_boundary_term(double m, std::span<const double> a, std::span<const double> b);

void write_gap_report(std::ostream& os, const GapReport& r);

struct ErrorMeasures {
  double rho2_primal = 0.0;
  double rho2_dual = 0.0;
  double rho2_total = 0.0;
};

ErrorMeasures strong_convexity_measures(const CrFunction& v, const Rt0Function& y, const CrFunction& u_star,
                                        const Rt0Function& z_star, const DiscreteProblem& p);

struct AprioriIdentity {
  double lhs = 0.0;       // rho_tot^2(Pi^cr u, Pi^rt z) against the discrete optimum
  double rhs = 0.0;       // four-term identity with continuous boundary norms
  double mismatch = 0.0;  // |lhs - rhs|
  double rhs_flux = 0.0;  // 1/2 ||Pi_h z - Pi_h Pi^rt z||^2 alone
  double rhs_split = 0.0;  // flux term + m/2 ||pi(z.n)||_inf^2 + (pi(z.n), u) + ||pi u||_1^2 / (2m)
  double mismatch_split = 0.0;
  double div_violation = 0.0;  // max |div Pi^rt z + f_h|
};

// u, z exact solution; (u_h, z_h) the discrete optimum on p.mesh.
AprioriIdentity apriori_identity_check(const DiscreteProblem& p, const ScalarFn& u, const VectorFn& z,
                                       const CrFunction& u_h, const Rt0Function& z_h);

// m |<u>_S| / ||pi_h u||_{1,Gamma_I}, one value per insulated side.
std::vector<double> distribution(const CrFunction& u, double m);

// rate_i = log(v_i / v_{i-1}) / log(s_i / s_{i-1}), i >= 1.
std::vector<double> eoc(std::span<const double> values, std::span<const double> sizes);

}  // namespace insulate
