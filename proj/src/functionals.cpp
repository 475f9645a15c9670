#include "insulate/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "insulate/errors.hpp"
#include "insulate/kernels.hpp"
#include "insulate/quadrature.hpp"

namespace insulate {
namespace {

const kernels::KernelTable& K() { return kernels::active(); }

double value_or_zero(const ScalarFn& f, Vec2 x) { return f ? f(x) : 0.0; }

// Exact ||y||_T^2 for affine y: edge-midpoint rule.
double rt_l2_squared(const Rt0Function& y, std::size_t t) {
  const Triangulation& mesh = y.mesh();
  double s = 0.0;
  for (std::size_t side : mesh.element_sides(t)) s += norm2(y.value(t, mesh.side_midpoint(side)));
  return mesh.area(t) * s / 3.0;
}

// Endpoint values of the trace of a CR function on a boundary side.
std::pair<double, double> cr_trace(const CrFunction& v, std::size_t s) {
  const Triangulation& mesh = v.mesh();
  const std::size_t t = mesh.side_minus(s);
  const auto [a, b] = mesh.side(s);
  return {v.value(t, mesh.vertex(a)), v.value(t, mesh.vertex(b))};
}

double p1_vertex(const P1Function& v, std::size_t p) { return v.values()[p]; }

void fill_b_terms(GapReport& r, double m, std::span<const double> a, std::span<const double> b,
                  std::span<const double> babs) {
  const std::size_t n = a.size();
  r.eta2_B_per_side.assign(n, 0.0);
  if (n) K().side_indicator(n, a.data(), b.data(), m, r.eta2_B_per_side.data());
  r.eta2_B_side_exact.resize(n);
  double sum_ab = 0.0, sum_abs = 0.0, amax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.eta2_B_side_exact[i] = 0.5 * m * a[i] * a[i] + a[i] * b[i] + babs[i] * babs[i] / (2.0 * m);
    sum_ab += a[i] * b[i];
    sum_abs += babs[i];
    amax = std::max(amax, std::abs(a[i]));
  }
  r.eta2_B_global = 0.0;
  for (double e : r.eta2_B_per_side) r.eta2_B_global += e;
  r.eta2_B_exact = 0.5 * m * amax * amax + sum_ab + sum_abs * sum_abs / (2.0 * m);
}

// max over the segment of |h|, h smooth: sampling plus ternary refinement.
double segment_max_abs(const std::function<double(Vec2)>& h, Vec2 p, Vec2 q) {
  constexpr int n = 16;
  auto at = [&](double t) { return std::abs(h(p + t * (q - p))); };
  int best = 0;
  double vbest = at(0.0);
  for (int i = 1; i <= n; ++i) {
    const double v = at(double(i) / n);
    if (v > vbest) {
      vbest = v;
      best = i;
    }
  }
  double lo = std::max(0.0, double(best - 1) / n), hi = std::min(1.0, double(best + 1) / n);
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (at(m1) < at(m2)) lo = m1; else hi = m2;
  }
  return std::max(vbest, at(0.5 * (lo + hi)));
}

}  // namespace

double abs_integral_affine(double va, double vb, double len) {
  if (va * vb >= 0.0) return 0.5 * len * std::abs(va + vb);
  return 0.5 * len * (va * va + vb * vb) / std::abs(va - vb);
}

bool data_is_piecewise_constant(const Triangulation& mesh, const ProblemData& data, double tol) {
  const TriangleRule& q = triangle_rule();
  if (data.f)
    for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
      const Element& e = mesh.element(t);
      const double f0 = data.f(mesh.barycenter(t));
      for (const auto& l : q.bary) {
        const Vec2 x = l[0] * mesh.vertex(e[0]) + l[1] * mesh.vertex(e[1]) + l[2] * mesh.vertex(e[2]);
        if (std::abs(data.f(x) - f0) > tol * (1.0 + std::abs(f0))) return false;
      }
    }
  if (data.g)
    for (std::size_t s : mesh.sides_with(BoundaryLabel::Neumann)) {
      const auto [a, b] = mesh.side(s);
      const double g0 = data.g(mesh.side_midpoint(s));
      for (double t : segment_rule().t) {
        const double gx = data.g(mesh.vertex(a) + t * (mesh.vertex(b) - mesh.vertex(a)));
        if (std::abs(gx - g0) > tol * (1.0 + std::abs(g0))) return false;
      }
    }
  return true;
}

double discrete_primal_energy(const CrFunction& v, const DiscreteProblem& p, bool check) {
  const Triangulation& mesh = v.mesh();
  if (check)
    for (std::size_t s : mesh.sides_with(BoundaryLabel::Dirichlet))
      if (std::abs(v[s] - p.uD_h[s]) > 1e-10)
        throw InadmissibleError("CR candidate violates the Dirichlet condition on side " + std::to_string(s));
  double e = 0.0;
  for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    e += mesh.area(t) * (0.5 * norm2(v.gradient(t)) - p.f_h[t] * v.element_mean(t));
  double l1 = 0.0;
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Insulated)) l1 += mesh.side_length(s) * std::abs(v[s]);
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Neumann)) e -= mesh.side_length(s) * p.g_h[s] * v[s];
  return e + l1 * l1 / (2.0 * p.m);
}

namespace {

// div y sums side fluxes over |T|, so its rounding error grows with this scale
double flux_scale(const Rt0Function& y, std::size_t t) {
  const Triangulation& mesh = y.mesh();
  double flux = 0.0;
  for (std::size_t s : mesh.element_sides(t)) flux += std::abs(y[s]) * mesh.side_length(s);
  return flux / mesh.area(t);
}

}  // namespace

double discrete_dual_energy(const Rt0Function& y, const DiscreteProblem& p, bool check) {
  const Triangulation& mesh = y.mesh();
  if (check) {
    double fmax = 0.0;
    for (double f : p.f_h) fmax = std::max(fmax, std::abs(f));
    for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
      if (std::abs(y.divergence(t) + p.f_h[t]) > 1e-10 * (1.0 + fmax + flux_scale(y, t)))
        throw InadmissibleError("flux violates div y = -f_h on element " + std::to_string(t));
    }
    for (std::size_t s : mesh.sides_with(BoundaryLabel::Neumann))
      if (std::abs(y[s] - p.g_h[s]) > 1e-10 * (1.0 + std::abs(p.g_h[s])))
        throw InadmissibleError("flux violates y.n = g_h on side " + std::to_string(s));
  }
  double e = 0.0;
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) e -= 0.5 * mesh.area(t) * norm2(y.average(t));
  double amax = 0.0;
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Insulated)) amax = std::max(amax, std::abs(y[s]));
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Dirichlet)) e += mesh.side_length(s) * y[s] * p.uD_h[s];
  return e - 0.5 * p.m * amax * amax;
}

double continuous_primal_energy(const P1Function& v, const ProblemData& data) {
  const Triangulation& mesh = v.mesh();
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Dirichlet))
    for (std::size_t q : mesh.side(s)) {
      const double ud = value_or_zero(data.u_D, mesh.vertex(q));
      if (std::abs(p1_vertex(v, q) - ud) > 1e-10 * (1.0 + std::abs(ud)))
        throw InadmissibleError("P1 candidate violates the Dirichlet condition at vertex " + std::to_string(q));
    }
  double e = 0.0;
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    e += 0.5 * mesh.area(t) * norm2(v.gradient(t));
    if (data.f) {
      const Element& el = mesh.element(t);
      e -= integrate_triangle([&](Vec2 x) { return data.f(x) * v.value(t, x); }, mesh.vertex(el[0]),
                              mesh.vertex(el[1]), mesh.vertex(el[2]));
    }
  }
  double l1 = 0.0;
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Insulated)) {
    const auto [a, b] = mesh.side(s);
    l1 += abs_integral_affine(p1_vertex(v, a), p1_vertex(v, b), mesh.side_length(s));
  }
  if (data.g)
    for (std::size_t s : mesh.sides_with(BoundaryLabel::Neumann)) {
      const auto [a, b] = mesh.side(s);
      const std::size_t t = mesh.side_minus(s);
      e -= integrate_segment([&](Vec2 x) { return data.g(x) * v.value(t, x); }, mesh.vertex(a), mesh.vertex(b));
    }
  return e + l1 * l1 / (2.0 * data.m);
}

double continuous_dual_energy(const Rt0Function& y, const ProblemData& data) {
  const Triangulation& mesh = y.mesh();
  const TriangleRule& q = triangle_rule();
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    const Element& el = mesh.element(t);
    const double d = y.divergence(t);
    for (const auto& l : q.bary) {
      const Vec2 x = l[0] * mesh.vertex(el[0]) + l[1] * mesh.vertex(el[1]) + l[2] * mesh.vertex(el[2]);
      const double f = value_or_zero(data.f, x);
      if (std::abs(d + f) > 1e-10 * (1.0 + std::abs(f) + flux_scale(y, t)))
        throw InadmissibleError("div y = -f fails on element " + std::to_string(t) +
                                " (data not piecewise constant or flux not admissible)");
    }
  }
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Neumann)) {
    const auto [a, b] = mesh.side(s);
    for (double t : segment_rule().t) {
      const double g = value_or_zero(data.g, mesh.vertex(a) + t * (mesh.vertex(b) - mesh.vertex(a)));
      if (std::abs(y[s] - g) > 1e-10 * (1.0 + std::abs(g)))
        throw InadmissibleError("y.n = g fails on side " + std::to_string(s));
    }
  }
  double e = 0.0;
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) e -= 0.5 * rt_l2_squared(y, t);
  double amax = 0.0;
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Insulated)) amax = std::max(amax, std::abs(y[s]));
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Dirichlet)) {
    // lift: P1 with u_D vertex values on the Dirichlet part
    const auto [a, b] = mesh.side(s);
    const double mean = 0.5 * (value_or_zero(data.u_D, mesh.vertex(a)) + value_or_zero(data.u_D, mesh.vertex(b)));
    e += y[s] * mesh.side_length(s) * mean;
  }
  return e - 0.5 * data.m * amax * amax;
}

double exact_boundary_term(double m, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("exact_boundary_term: size mismatch");
  double amax = 0.0, ab = 0.0, babs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    amax = std::max(amax, std::abs(a[i]));
    ab += a[i] * b[i];
    babs += std::abs(b[i]);
  }
  return 0.5 * m * amax * amax + ab + babs * babs / (2.0 * m);
}

GapReport gap_report(const CrFunction& v, const Rt0Function& y, const DiscreteProblem& p) {
  const Triangulation& mesh = v.mesh();
  GapReport r;
  r.primal_energy = discrete_primal_energy(v, p);
  r.dual_energy = discrete_dual_energy(y, p);
  r.gap = r.primal_energy - r.dual_energy;

  const std::size_t ne = mesh.num_elements();
  std::vector<double> w(ne), gx(ne), gy(ne), yx(ne), yy(ne);
  for (std::size_t t = 0; t < ne; ++t) {
    w[t] = mesh.area(t);
    const Vec2 g = v.gradient(t), a = y.average(t);
    gx[t] = g.x; gy[t] = g.y; yx[t] = a.x; yy[t] = a.y;
  }
  r.eta2_A_per_element.assign(ne, 0.0);
  if (ne) K().element_misfit(ne, w.data(), gx.data(), gy.data(), yx.data(), yy.data(), r.eta2_A_per_element.data());
  for (double e : r.eta2_A_per_element) r.eta2_A_global += e;
  r.eta2_A_global *= 0.5;

  r.sides = mesh.sides_with(BoundaryLabel::Insulated);
  std::vector<double> a, b, babs;
  for (std::size_t s : r.sides) {
    const auto [va, vb] = cr_trace(v, s);
    a.push_back(y[s]);
    b.push_back(mesh.side_length(s) * v[s]);
    babs.push_back(abs_integral_affine(va, vb, mesh.side_length(s)));
  }
  fill_b_terms(r, p.m, a, b, babs);
  // the discrete identity uses pi_h v in the L1 term
  r.eta2_B_exact = exact_boundary_term(p.m, a, b);
  return r;
}

GapReport gap_report(const P1Function& v, const Rt0Function& y, const ProblemData& data) {
  const Triangulation& mesh = v.mesh();
  GapReport r;
  r.primal_energy = continuous_primal_energy(v, data);
  r.dual_energy = continuous_dual_energy(y, data);
  r.gap = r.primal_energy - r.dual_energy;

  // ||grad v - y||_T^2 by the edge-midpoint rule, exact for affine y
  const std::size_t ne = mesh.num_elements(), n = 3 * ne;
  std::vector<double> w(n), gx(n), gy(n), yx(n), yy(n), out(n);
  for (std::size_t t = 0; t < ne; ++t) {
    const Vec2 g = v.gradient(t);
    const auto& es = mesh.element_sides(t);
    for (int i = 0; i < 3; ++i) {
      const Vec2 yv = y.value(t, mesh.side_midpoint(es[i]));
      const std::size_t k = 3 * t + i;
      w[k] = mesh.area(t) / 3.0;
      gx[k] = g.x; gy[k] = g.y; yx[k] = yv.x; yy[k] = yv.y;
    }
  }
  if (n) K().element_misfit(n, w.data(), gx.data(), gy.data(), yx.data(), yy.data(), out.data());
  r.eta2_A_per_element.resize(ne);
  for (std::size_t t = 0; t < ne; ++t) {
    r.eta2_A_per_element[t] = out[3 * t] + out[3 * t + 1] + out[3 * t + 2];
    r.eta2_A_global += r.eta2_A_per_element[t];
  }
  r.eta2_A_global *= 0.5;

  r.sides = mesh.sides_with(BoundaryLabel::Insulated);
  std::vector<double> a, b, babs;
  for (std::size_t s : r.sides) {
    const auto [p, q] = mesh.side(s);
    const double va = p1_vertex(v, p), vb = p1_vertex(v, q);
    a.push_back(y[s]);
    b.push_back(0.5 * mesh.side_length(s) * (va + vb));
    babs.push_back(abs_integral_affine(va, vb, mesh.side_length(s)));
  }
  fill_b_terms(r, data.m, a, b, babs);
  return r;
}

void write_gap_report(std::ostream& os, const GapReport& r) {
  os << "kind,index,value\n";
  char buf[64];
  auto row = [&](const char* kind, std::size_t i, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << kind << "," << i << "," << buf << "\n";
  };
  for (std::size_t t = 0; t < r.eta2_A_per_element.size(); ++t) row("eta2_A", t, r.eta2_A_per_element[t]);
  for (std::size_t i = 0; i < r.sides.size(); ++i) row("eta2_B", r.sides[i], r.eta2_B_per_side[i]);
  row("eta2_A_global", 0, r.eta2_A_global);
  row("eta2_B_global", 0, r.eta2_B_global);
  row("eta2_B_exact", 0, r.eta2_B_exact);
  row("primal_energy", 0, r.primal_energy);
  row("dual_energy", 0, r.dual_energy);
  row("gap", 0, r.gap);
}

ErrorMeasures strong_convexity_measures(const CrFunction& v, const Rt0Function& y, const CrFunction& u_star,
                                        const Rt0Function& z_star, const DiscreteProblem& p) {
  ErrorMeasures e;
  e.rho2_primal = discrete_primal_energy(v, p) - discrete_primal_energy(u_star, p);
  e.rho2_dual = discrete_dual_energy(z_star, p) - discrete_dual_energy(y, p);
  e.rho2_total = e.rho2_primal + e.rho2_dual;
  return e;
}

AprioriIdentity apriori_identity_check(const DiscreteProblem& p, const ScalarFn& u, const VectorFn& z,
                                       const CrFunction& u_h, const Rt0Function& z_h) {
  const Triangulation& mesh = *p.mesh;
  const CrFunction ucr = cr_interpolate(u, p.mesh);
  const Rt0Function zrt = rt_interpolate(z, p.mesh);
  AprioriIdentity r;
  // Pi^rt z is admissible only up to quadrature error; report it instead of throwing
  for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    r.div_violation = std::max(r.div_violation, std::abs(zrt.divergence(t) + p.f_h[t]));
  r.lhs = discrete_primal_energy(ucr, p) - discrete_primal_energy(u_h, p) + discrete_dual_energy(z_h, p) -
          discrete_dual_energy(zrt, p, false);

  // 1/2 ||Pi_h z - Pi_h Pi^rt z||^2
  const PwConstScalar zx = element_mean([&](Vec2 x) { return z(x).x; }, mesh, 2);
  const PwConstScalar zy = element_mean([&](Vec2 x) { return z(x).y; }, mesh, 2);
  for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    r.rhs_flux += 0.5 * mesh.area(t) * norm2(Vec2{zx[t], zy[t]} - zrt.average(t));

  double cross_term = 0.0, pzn_max = 0.0, zn_max = 0.0, pu_l1 = 0.0, u_l1 = 0.0, pzn_u = 0.0;
  for (std::size_t s : mesh.sides_with(BoundaryLabel::Insulated)) {
    const auto [a, b] = mesh.side(s);
    const Vec2 pa = mesh.vertex(a), pb = mesh.vertex(b), n = mesh.side_normal(s);
    const double len = mesh.side_length(s);
    const auto zn = [&](Vec2 x) { return dot(z(x), n); };
    const double pzn = zrt[s], pu = ucr[s];
    cross_term += integrate_segment([&](Vec2 x) { return (pzn - zn(x)) * (u(x) - pu); }, pa, pb, 4);
    pzn_max = std::max(pzn_max, std::abs(pzn));
    zn_max = std::max(zn_max, segment_max_abs(zn, pa, pb));
    pu_l1 += len * std::abs(pu);
    u_l1 += integrate_segment([&](Vec2 x) { return std::abs(u(x)); }, pa, pb, 4);
    pzn_u += pzn * len * pu;
  }
  const double m = p.m;
  r.rhs = r.rhs_flux + cross_term + 0.5 * m * (pzn_max * pzn_max - zn_max * zn_max) +
          (pu_l1 * pu_l1 - u_l1 * u_l1) / (2.0 * m);
  r.rhs_split = r.rhs_flux + 0.5 * m * pzn_max * pzn_max + pzn_u + pu_l1 * pu_l1 / (2.0 * m);
  r.mismatch = std::abs(r.lhs - r.rhs);
  r.mismatch_split = std::abs(r.lhs - r.rhs_split);
  return r;
}

std::vector<double> distribution(const CrFunction& u, double m) {
  const Triangulation& mesh = u.mesh();
  const auto& sides = mesh.sides_with(BoundaryLabel::Insulated);
  double l1 = 0.0;
  for (std::size_t s : sides) l1 += mesh.side_length(s) * std::abs(u[s]);
  if (!(l1 > 0.0)) throw DegenerateTraceError("insulated trace has zero L1 norm");
  std::vector<double> h;
  h.reserve(sides.size());
  for (std::size_t s : sides) h.push_back(m * std::abs(u[s]) / l1);
  return h;
}

std::vector<double> eoc(std::span<const double> values, std::span<const double> sizes) {
  if (values.size() != sizes.size()) throw Error("eoc: size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] > 0.0) || !(sizes[i] > 0.0)) throw Error("eoc: values and sizes must be positive");
  std::vector<double> r;
  for (std::size_t i = 1; i < values.size(); ++i)
    r.push_back(std::log(values[i] / values[i - 1]) / std::log(sizes[i] / sizes[i - 1]));
  return r;
}

}  // namespace insulate
