#include <cmath>

#include "doctest.h"
#include "insulate/assembly.hpp"
#include "insulate/errors.hpp"
#include "oracles.hpp"

using namespace insulate;
using L = BoundaryLabel;
using doctest::Approx;

namespace {

MeshPtr setup2(int level) {
  return std::make_shared<const Triangulation>(generate_lshape(level, LShapeSetup::MixedBoundary));
}

ProblemData general_data() {
  ProblemData d;
  d.m = 2.0;
  d.f = [](Vec2 x) { return 1.0 + x.x * x.y; };
  d.g = [](Vec2 x) { return 0.5 - x.y; };
  d.u_D = [](Vec2 x) { return x.x * x.x; };
  return d;
}

}  // namespace

TEST_CASE("reference triangle blocks") {
  const KktSystem sys = assemble(oracle::reference_triangle(), ProblemData{});
  const auto& B = sys.mats.B;
  REQUIRE(B.rows() == 1);
  REQUIRE(B.cols() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t s = sys.mats.map.dof_side[i];
    CHECK(B.coeff(0, i) == Approx(sys.problem.mesh->side_length(s)));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += B.coeff(0, i);
  CHECK(total == Approx(2.0 + std::sqrt(2.0)));
  CHECK(sys.mats.M_I.size() == 3);
}

TEST_CASE("zero data gives zero data vectors") {
  const KktSystem sys = assemble(setup2(1), ProblemData{});
  for (double v : sys.vecs.F_g) CHECK(v == 0.0);
  for (double v : sys.vecs.Z_g) CHECK(v == 0.0);
  for (double v : sys.vecs.U_D) CHECK(v == 0.0);
  for (double v : sys.vecs.z_g.dof()) CHECK(v == 0.0);
}

TEST_CASE("f = 1 on the two-element square") {
  ProblemData d;
  d.f = [](Vec2) { return 1.0; };
  const KktSystem sys = assemble(oracle::two_element_square(), d);
  REQUIRE(sys.vecs.F_g.size() == 2);
  CHECK(sys.vecs.F_g[0] == Approx(0.5));
  CHECK(sys.vecs.F_g[1] == Approx(0.5));
}

TEST_CASE("dof map leaves out exactly the Neumann sides") {
  const auto m = setup2(2);
  const KktSystem sys = assemble(m, general_data());
  const auto& map = sys.mats.map;
  CHECK(map.num_dofs() == m->num_sides() - m->sides_with(L::Neumann).size());
  for (std::size_t s : m->sides_with(L::Neumann)) CHECK(map.side_dof[s] == npos);
  for (std::size_t i = 0; i < map.num_dofs(); ++i) {
    CHECK(map.side_dof[map.dof_side[i]] == i);
    if (i > 0) CHECK(map.dof_side[i] > map.dof_side[i - 1]);
  }
  CHECK(map.insulated.size() == m->sides_with(L::Insulated).size());
  CHECK(map.dirichlet.size() == m->sides_with(L::Dirichlet).size());
  // trace maps are row selections
  for (std::size_t p = 0; p < map.insulated.size(); ++p) {
    CHECK(sys.mats.T_I.coeff(p, map.insulated[p]) == 1.0);
    CHECK(sys.mats.M_I[p] == Approx(m->side_length(map.dof_side[map.insulated[p]])));
    CHECK(sys.mats.M_I[p] > 0.0);
  }
  CHECK(sys.mats.T_I.nnz() == map.insulated.size());
  CHECK(sys.mats.T_D.nnz() == map.dirichlet.size());
}

TEST_CASE("A is symmetric positive semidefinite and matches the quadratic form") {
  oracle::Rng rng(1);
  const auto m = oracle::jitter(setup2(2), rng, 0.03);
  const KktSystem sys = assemble(m, general_data());
  const auto& A = sys.mats.A;
  const auto& map = sys.mats.map;
  const std::size_t n = map.num_dofs();
  for (const Triplet& t : A.triplets()) CHECK(A.coeff(t.col, t.row) == Approx(t.value).epsilon(1e-14));
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> Y(n), full(m->num_sides(), 0.0);
    for (std::size_t i = 0; i < n; ++i) full[map.dof_side[i]] = Y[i] = oracle::uniform(rng);
    const auto AY = matvec(A, Y);
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += Y[i] * AY[i];
    const Rt0Function y(m, full);
    double ref = 0.0;
    for (std::size_t t = 0; t < m->num_elements(); ++t) ref += m->area(t) * norm2(y.average(t));
    CHECK(q >= 0.0);
    CHECK(q == Approx(ref).epsilon(1e-12));
    // B Y is the element divergence times the area
    const auto BY = matvec(sys.mats.B, Y);
    for (std::size_t t = 0; t < m->num_elements(); ++t)
      CHECK(BY[t] == Approx(y.divergence(t) * m->area(t)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("column of B for a side dof") {
  const auto m = setup2(1);
  const KktSystem sys = assemble(m, ProblemData{});
  const SparseMatrix Bt = sys.mats.B.transpose();
  for (std::size_t i = 0; i < sys.mats.map.num_dofs(); ++i) {
    const std::size_t s = sys.mats.map.dof_side[i];
    const auto& rp = Bt.row_ptr();
    const int count = rp[i + 1] - rp[i];
    CHECK(count == (m->is_boundary(s) ? 1 : 2));
    for (std::int32_t k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t t = static_cast<std::size_t>(Bt.col_idx()[k]);
      CHECK((t == m->side_minus(s) || t == m->side_plus(s)));
      const double expect = (t == m->side_minus(s) ? 1.0 : -1.0) * m->side_length(s);
      CHECK(Bt.values()[k] == Approx(expect));
    }
  }
}

TEST_CASE("lifting and boundary data vectors") {
  const auto m = setup2(2);
  const ProblemData d = general_data();
  const KktSystem sys = assemble(m, d);
  const DiscreteProblem& p = sys.problem;
  for (std::size_t s = 0; s < m->num_sides(); ++s) {
    if (m->has_label(s, L::Neumann)) {
      CHECK(sys.vecs.z_g[s] == Approx(p.g_h[s]));
      CHECK(p.g_h[s] == Approx(side_mean_fn(d.g, *m, s)));
    } else {
      CHECK(sys.vecs.z_g[s] == 0.0);
    }
    if (m->has_label(s, L::Dirichlet)) CHECK(p.uD_h[s] == Approx(side_mean_fn(d.u_D, *m, s)));
  }
  const auto& map = sys.mats.map;
  for (std::size_t i = 0; i < map.num_dofs(); ++i) {
    const std::size_t s = map.dof_side[i];
    const double expect = m->has_label(s, L::Dirichlet) ? m->side_length(s) * p.uD_h[s] : 0.0;
    CHECK(sys.vecs.U_D[i] == Approx(expect).scale(1.0));
  }
  // F_g = |T| (f_h + div z_g)
  for (std::size_t t = 0; t < m->num_elements(); ++t)
    CHECK(sys.vecs.F_g[t] == Approx(m->area(t) * (p.f_h[t] + sys.vecs.z_g.divergence(t))).scale(1.0));
  // Z_g_i = (Pi_h z_g, Pi_h psi_i)
  for (std::size_t i = 0; i < map.num_dofs(); ++i) {
    std::vector<double> e(m->num_sides(), 0.0);
    e[map.dof_side[i]] = 1.0;
    const Rt0Function psi(m, e);
    double ref = 0.0;
    for (std::size_t t = 0; t < m->num_elements(); ++t)
      ref += m->area(t) * dot(sys.vecs.z_g.average(t), psi.average(t));
    CHECK(sys.vecs.Z_g[i] == Approx(ref).scale(1.0));
  }
}

TEST_CASE("flux and dof vectors round trip") {
  oracle::Rng rng(2);
  const auto m = setup2(1);
  const KktSystem sys = assemble(m, general_data());
  std::vector<double> Z(sys.mats.map.num_dofs());
  for (double& z : Z) z = oracle::uniform(rng);
  const Rt0Function y = flux_from_dofs(sys, Z);
  for (std::size_t s : m->sides_with(L::Neumann)) CHECK(y[s] == Approx(sys.problem.g_h[s]));
  const auto back = dofs_from_flux(sys, y);
  for (std::size_t i = 0; i < Z.size(); ++i) CHECK(back[i] == Approx(Z[i]));
}

TEST_CASE("element means of f use the requested composite rule") {
  ProblemData d;
  d.f = [](Vec2 x) { return std::exp(x.x); };
  const auto m = oracle::reference_triangle();
  // int_T e^x over the reference triangle = e - 2
  const double exact = 2.0 * (std::exp(1.0) - 2.0);
  const double err0 = std::abs(discretize(m, d).f_h[0] - exact);
  d.f_depth = 2;
  const double err2 = std::abs(discretize(m, d).f_h[0] - exact);
  CHECK(err2 <= 1e-5);
  CHECK(err2 < err0 / 50.0);
  d.f = [](Vec2 x) { return x.x * x.y; };
  CHECK(discretize(m, d).f_h[0] == Approx(1.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("check_compatibility") {
  ProblemData d;
  d.m = 3.0;
  d.f = [](Vec2) { return 1.0; };
  SUBCASE("setup 1") {
    const auto r = check_compatibility(std::make_shared<const Triangulation>(generate_lshape(1)), d);
    CHECK(r.residual <= 1e-12);
    CHECK(r.insulated_measure == Approx(8.0));
  }
  SUBCASE("setup 2") {
    const auto r = check_compatibility(setup2(1), d);
    CHECK(r.residual <= 1e-12);
    CHECK(r.num_dirichlet == 2);
    CHECK(r.num_neumann == 2);
  }
  SUBCASE("no insulated part") {
    CHECK_THROWS_AS(check_compatibility(oracle::two_element_square(L::Neumann), d), CompatibilityError);
    CHECK_THROWS_AS(check_compatibility(oracle::two_element_square(L::Dirichlet), d), CompatibilityError);
  }
}
