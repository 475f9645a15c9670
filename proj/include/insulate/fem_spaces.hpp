#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "insulate/mesh.hpp"

namespace insulate {

using PwConstScalar = std::vector<double>;
using PwConstVector = std::vector<Vec2>;

// Crouzeix-Raviart function; dof(s) is the mean over side s.
class CrFunction {
 public:
  explicit CrFunction(MeshPtr mesh);
  CrFunction(MeshPtr mesh, std::vector<double> dof);

  const Triangulation& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const std::vector<double>& dof() const { return dof_; }
  std::vector<double>& dof() { return dof_; }
  double operator[](std::size_t s) const { return dof_[s]; }

  Vec2 gradient(std::size_t t) const;
  double element_mean(std::size_t t) const;
  double value(std::size_t t, Vec2 x) const;

 private:
  MeshPtr mesh_;
  std::vector<double> dof_;
};

// Lowest-order Raviart-Thomas field; dof(s) is the constant y.n_S on side s.
class Rt0Function {
 public:
  explicit Rt0Function(MeshPtr mesh);
  Rt0Function(MeshPtr mesh, std::vector<double> dof);

  const Triangulation& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const std::vector<double>& dof() const { return dof_; }
  std::vector<double>& dof() { return dof_; }
  double operator[](std::size_t s) const { return dof_[s]; }

  double divergence(std::size_t t) const;
  Vec2 average(std::size_t t) const;
  Vec2 value(std::size_t t, Vec2 x) const;

 private:
  MeshPtr mesh_;
  std::vector<double> dof_;
};

// Continuous piecewise affine function, one value per vertex.
class P1Function {
 public:
  P1Function(MeshPtr mesh, std::vector<double> values);

  const Triangulation& mesh() const { return *mesh_; }
  const std::vector<double>& values() const { return values_; }
  Vec2 gradient(std::size_t t) const;
  double value(std::size_t t, Vec2 x) const;

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
};

// Element-wise affine, no continuity: v|_T(x) = mean_T + grad_T.(x - x_T).
struct PwAffine {
  MeshPtr mesh;
  std::vector<double> mean;
  std::vector<Vec2> grad;
  double value(std::size_t t, Vec2 x) const;
  double side_mean(std::size_t t, std::size_t s) const;
};

// Gradient of the affine element basis function lambda_i (vertex i).
Vec2 barycentric_gradient(const Triangulation& mesh, std::size_t t, int i);

PwConstVector cr_gradient(const CrFunction& v);
PwConstScalar cr_element_means(const CrFunction& v);
PwConstScalar rt_divergence(const Rt0Function& y);
PwConstVector rt_piecewise_average(const Rt0Function& y);

CrFunction cr_interpolate(const ScalarFn& f, const MeshPtr& mesh);
Rt0Function rt_interpolate(const VectorFn& g, const MeshPtr& mesh);

double side_mean(const CrFunction& v, std::size_t s);
double side_mean_fn(const ScalarFn& g, const Triangulation& mesh, std::size_t s);
// depth > 0 uses the composite element rule on 4^depth subtriangles.
PwConstScalar element_mean(const ScalarFn& f, const Triangulation& mesh, int depth = 0);

// Vertex value = mean of the element reconstructions at that vertex. When
// dirichlet (one value per side) is given, vertices on Dirichlet sides take
// the mean of the adjacent prescribed side values instead.
P1Function node_average(const CrFunction& v, std::span<const double> dirichlet = {});

PwAffine to_pw_affine(const CrFunction& v);
// Mean of (trace from T+ minus trace from T-) over an interior side.
double jump_mean(const PwAffine& v, std::size_t s);
double jump_mean(const CrFunction& v, std::size_t s);

// CSV dumps: header "side,<name>" or "element,<name>".
void write_side_csv(std::ostream& os, const std::string& name, std::span<const double> values);
void write_element_csv(std::ostream& os, const std::string& name, std::span<const double> values);

}  // namespace insulate
