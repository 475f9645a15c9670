#include "insulate/fem_spaces.hpp"

#include <cstdio>
#include <ostream>

#include "insulate/errors.hpp"
#include "insulate/quadrature.hpp"

namespace insulate {
namespace {

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw Error(std::string(what) + ": expected " + std::to_string(want) + " values, got " +
                std::to_string(got));
}

void write_csv(std::ostream& os, const char* index, const std::string& name,
               std::span<const double> values) {
  os << index << "," << name << "\n";
  char buf[48];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    os << i << "," << buf << "\n";
  }
}

}  // namespace

Vec2 barycentric_gradient(const Triangulation& mesh, std::size_t t, int i) {
  const Element& e = mesh.element(t);
  const Vec2 d = mesh.vertex(e[(i + 2) % 3]) - mesh.vertex(e[(i + 1) % 3]);
  const double s = 0.5 / mesh.area(t);
  return {-d.y * s, d.x * s};
}

CrFunction::CrFunction(MeshPtr mesh) : mesh_(std::move(mesh)), dof_(mesh_->num_sides(), 0.0) {}

CrFunction::CrFunction(MeshPtr mesh, std::vector<double> dof)
    : mesh_(std::move(mesh)), dof_(std::move(dof)) {
  check_size(dof_.size(), mesh_->num_sides(), "CrFunction");
}

Vec2 CrFunction::gradient(std::size_t t) const {
  // basis of side i is 1 - 2 lambda_i
  const auto& es = mesh_->element_sides(t);
  Vec2 g;
  for (int i = 0; i < 3; ++i) g -= (2.0 * dof_[es[i]]) * barycentric_gradient(*mesh_, t, i);
  return g;
}

double CrFunction::element_mean(std::size_t t) const {
  const auto& es = mesh_->element_sides(t);
  return (dof_[es[0]] + dof_[es[1]] + dof_[es[2]]) / 3.0;
}

double CrFunction::value(std::size_t t, Vec2 x) const {
  return element_mean(t) + dot(gradient(t), x - mesh_->barycenter(t));
}

Rt0Function::Rt0Function(MeshPtr mesh) : mesh_(std::move(mesh)), dof_(mesh_->num_sides(), 0.0) {}

Rt0Function::Rt0Function(MeshPtr mesh, std::vector<double> dof)
    : mesh_(std::move(mesh)), dof_(std::move(dof)) {
  check_size(dof_.size(), mesh_->num_sides(), "Rt0Function");
}

double Rt0Function::divergence(std::size_t t) const {
  const auto& es = mesh_->element_sides(t);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += mesh_->sigma(t, i) * dof_[es[i]] * mesh_->side_length(es[i]);
  return s / mesh_->area(t);
}

Vec2 Rt0Function::average(std::size_t t) const {
  // psi_S|_T = sigma |S| / (2|T|) (x - P_S), P_S the vertex opposite S
  const auto& es = mesh_->element_sides(t);
  const Element& e = mesh_->element(t);
  const Vec2 xt = mesh_->barycenter(t);
  const double h = 0.5 / mesh_->area(t);
  Vec2 a;
  for (int i = 0; i < 3; ++i)
    a += (h * mesh_->sigma(t, i) * dof_[es[i]] * mesh_->side_length(es[i])) * (xt - mesh_->vertex(e[i]));
  return a;
}

Vec2 Rt0Function::value(std::size_t t, Vec2 x) const {
  return average(t) + (0.5 * divergence(t)) * (x - mesh_->barycenter(t));
}

P1Function::P1Function(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  check_size(values_.size(), mesh_->num_vertices(), "P1Function");
}

Vec2 P1Function::gradient(std::size_t t) const {
  const Element& e = mesh_->element(t);
  Vec2 g;
  for (int i = 0; i < 3; ++i) g += values_[e[i]] * barycentric_gradient(*mesh_, t, i);
  return g;
}

double P1Function::value(std::size_t t, Vec2 x) const {
  const Element& e = mesh_->element(t);
  return values_[e[0]] + dot(gradient(t), x - mesh_->vertex(e[0]));
}

double PwAffine::value(std::size_t t, Vec2 x) const {
  return mean[t] + dot(grad[t], x - mesh->barycenter(t));
}

double PwAffine::side_mean(std::size_t t, std::size_t s) const {
  return value(t, mesh->side_midpoint(s));
}

PwConstVector cr_gradient(const CrFunction& v) {
  PwConstVector g(v.mesh().num_elements());
  for (std::size_t t = 0; t < g.size(); ++t) g[t] = v.gradient(t);
  return g;
}

PwConstScalar cr_element_means(const CrFunction& v) {
  PwConstScalar m(v.mesh().num_elements());
  for (std::size_t t = 0; t < m.size(); ++t) m[t] = v.element_mean(t);
  return m;
}

PwConstScalar rt_divergence(const Rt0Function& y) {
  PwConstScalar d(y.mesh().num_elements());
  for (std::size_t t = 0; t < d.size(); ++t) d[t] = y.divergence(t);
  return d;
}

PwConstVector rt_piecewise_average(const Rt0Function& y) {
  PwConstVector a(y.mesh().num_elements());
  for (std::size_t t = 0; t < a.size(); ++t) a[t] = y.average(t);
  return a;
}

double side_mean_fn(const ScalarFn& g, const Triangulation& mesh, std::size_t s) {
  const auto [a, b] = mesh.side(s);
  return integrate_segment(g, mesh.vertex(a), mesh.vertex(b)) / mesh.side_length(s);
}

double side_mean(const CrFunction& v, std::size_t s) { return v[s]; }

PwConstScalar element_mean(const ScalarFn& f, const Triangulation& mesh, int depth) {
  PwConstScalar m(mesh.num_elements());
  for (std::size_t t = 0; t < m.size(); ++t) {
    const Element& e = mesh.element(t);
    m[t] = integrate_triangle(f, mesh.vertex(e[0]), mesh.vertex(e[1]), mesh.vertex(e[2]), depth) /
           mesh.area(t);
  }
  return m;
}

CrFunction cr_interpolate(const ScalarFn& f, const MeshPtr& mesh) {
  std::vector<double> d(mesh->num_sides());
  for (std::size_t s = 0; s < d.size(); ++s) d[s] = side_mean_fn(f, *mesh, s);
  return CrFunction(mesh, std::move(d));
}

Rt0Function rt_interpolate(const VectorFn& g, const MeshPtr& mesh) {
  std::vector<double> d(mesh->num_sides());
  for (std::size_t s = 0; s < d.size(); ++s) {
    const Vec2 n = mesh->side_normal(s);
    d[s] = side_mean_fn([&](Vec2 x) { return dot(g(x), n); }, *mesh, s);
  }
  return Rt0Function(mesh, std::move(d));
}

P1Function node_average(const CrFunction& v, std::span<const double> dirichlet) {
  const Triangulation& mesh = v.mesh();
  std::vector<double> sum(mesh.num_vertices(), 0.0);
  std::vector<int> count(mesh.num_vertices(), 0);
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    const Element& e = mesh.element(t);
    for (std::size_t p : e) {
      sum[p] += v.value(t, mesh.vertex(p));
      ++count[p];
    }
  }
  for (std::size_t p = 0; p < sum.size(); ++p)
    if (count[p] > 0) sum[p] /= count[p];
  if (!dirichlet.empty()) {
    check_size(dirichlet.size(), mesh.num_sides(), "node_average dirichlet values");
    std::vector<double> dsum(mesh.num_vertices(), 0.0);
    std::vector<int> dcount(mesh.num_vertices(), 0);
    for (std::size_t s : mesh.sides_with(BoundaryLabel::Dirichlet))
      for (std::size_t p : mesh.side(s)) {
        dsum[p] += dirichlet[s];
        ++dcount[p];
      }
    for (std::size_t p = 0; p < sum.size(); ++p)
      if (dcount[p] > 0) sum[p] = dsum[p] / dcount[p];
  }
  return P1Function(v.mesh_ptr(), std::move(sum));
}

PwAffine to_pw_affine(const CrFunction& v) {
  PwAffine a{v.mesh_ptr(), cr_element_means(v), cr_gradient(v)};
  return a;
}

double jump_mean(const PwAffine& v, std::size_t s) {
  const Triangulation& mesh = *v.mesh;
  if (mesh.is_boundary(s)) throw Error("jump_mean on boundary side " + std::to_string(s));
  return v.side_mean(mesh.side_plus(s), s) - v.side_mean(mesh.side_minus(s), s);
}

double jump_mean(const CrFunction& v, std::size_t s) { return jump_mean(to_pw_affine(v), s); }

void write_side_csv(std::ostream& os, const std::string& name, std::span<const double> values) {
  write_csv(os, "side", name, values);
}

void write_element_csv(std::ostream& os, const std::string& name, std::span<const double> values) {
  write_csv(os, "element", name, values);
}

}  // namespace insulate
