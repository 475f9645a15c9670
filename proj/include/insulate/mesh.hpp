#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "insulate/types.hpp"

namespace insulate {

enum class BoundaryLabel : std::uint8_t { Insulated, Dirichlet, Neumann };

char label_char(BoundaryLabel l);
BoundaryLabel label_from_char(char c);

struct LabeledSide {
  std::size_t v0;
  std::size_t v1;
  BoundaryLabel label;
};

using Element = std::array<std::size_t, 3>;

// Conforming triangulation. Local side i of an element is the edge opposite
// local vertex i. Sides are stored as (min, max) vertex pairs; the side normal
// is the rotated tangent of that pair, flipped to point outward on the
// boundary. side_minus(s) is the element for which the normal is outward.
class Triangulation {
 public:
  // refinement_edges: local side index per element; longest edge if absent.
  Triangulation(std::vector<Vec2> vertices, std::vector<Element> elements,
                const std::vector<LabeledSide>& labels,
                std::optional<std::vector<int>> refinement_edges = std::nullopt,
                int generation = 0);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_sides() const { return sides_.size(); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(std::size_t v) const { return vertices_[v]; }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(std::size_t t) const { return elements_[t]; }
  const std::array<std::size_t, 3>& element_sides(std::size_t t) const { return element_sides_[t]; }
  const std::array<std::size_t, 2>& side(std::size_t s) const { return sides_[s]; }
  std::size_t side_minus(std::size_t s) const { return side_elems_[s][0]; }
  std::size_t side_plus(std::size_t s) const { return side_elems_[s][1]; }
  bool is_boundary(std::size_t s) const { return side_elems_[s][1] == npos; }
  std::optional<BoundaryLabel> label(std::size_t s) const;
  bool has_label(std::size_t s, BoundaryLabel l) const { return label_[s] == static_cast<int>(l); }
  const std::vector<std::size_t>& boundary_sides() const { return boundary_; }
  const std::vector<std::size_t>& sides_with(BoundaryLabel l) const {
    return by_label_[static_cast<int>(l)];
  }
  int refinement_edge(std::size_t t) const { return refinement_edge_[t]; }
  const std::vector<int>& refinement_edges() const { return refinement_edge_; }
  int generation() const { return generation_; }
  // npos if the vertex pair is not a side.
  std::size_t find_side(std::size_t a, std::size_t b) const;
  // Local index of side s in element t.
  int local_side(std::size_t t, std::size_t s) const;

  double area(std::size_t t) const { return area_[t]; }
  Vec2 barycenter(std::size_t t) const;
  double side_length(std::size_t s) const { return length_[s]; }
  const Vec2& side_normal(std::size_t s) const { return normal_[s]; }
  Vec2 side_midpoint(std::size_t s) const;
  // +1 if the side normal points out of t, -1 otherwise.
  double sigma(std::size_t t, int local) const {
    return side_elems_[element_sides_[t][local]][0] == t ? 1.0 : -1.0;
  }
  double diameter(std::size_t t) const;
  double domain_area() const;
  // (|domain| / #vertices)^(1/2)
  double mesh_size() const;
  double max_diameter() const;
  double min_angle() const;

  std::vector<LabeledSide> labeled_sides() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<Element> elements_;
  std::vector<std::array<std::size_t, 3>> element_sides_;
  std::vector<std::array<std::size_t, 2>> sides_;
  std::vector<std::array<std::size_t, 2>> side_elems_;
  std::vector<int> label_;  // -1 for interior sides
  std::vector<std::size_t> boundary_;
  std::array<std::vector<std::size_t>, 3> by_label_;
  std::vector<int> refinement_edge_;
  std::vector<double> area_;
  std::vector<double> length_;
  std::vector<Vec2> normal_;
  std::unordered_map<std::uint64_t, std::size_t> side_index_;
  int generation_ = 0;
};

using MeshPtr = std::shared_ptr<const Triangulation>;

Triangulation build_mesh(std::vector<Vec2> vertices, std::vector<Element> elements,
                         const std::vector<LabeledSide>& labels);

// Newest-vertex bisection; every marked element is bisected at least once,
// neighbours are closed so that no hanging vertex remains.
Triangulation refine_nvb(const Triangulation& mesh, const std::vector<std::size_t>& marked);
// Bisects every edge: each element is split into four children.
Triangulation uniform_refine(const Triangulation& mesh);
// Same mesh, vertices moved (topology and labels kept).
Triangulation with_vertices(const Triangulation& mesh, std::vector<Vec2> vertices);

// Unit square [0,1]^2 with n x n cells split along the (i,j)-(i+1,j+1) diagonal.
// Labels from `labeler` evaluated at side midpoints (all Insulated if empty).
Triangulation generate_square(int n, const std::function<BoundaryLabel(Vec2)>& labeler = {});

enum class LShapeSetup { AllInsulated, MixedBoundary };
// (-1,1)^2 minus [0,1]x[-1,0]: 8 vertices, 6 triangles, diagonals through the
// re-entrant corner, 8 boundary sides. MixedBoundary puts Dirichlet on [0,1]x{0}
// and Neumann on {0}x[-1,0].
Triangulation generate_lshape(int level, LShapeSetup setup = LShapeSetup::AllInsulated);
// Ring 1/2 < r < 1: 3 radii x 12 sectors, 48 triangles; `level` uniform
// refinements with boundary vertices snapped back onto the circles.
Triangulation generate_annulus(int level);

void write_mesh(std::ostream& os, const Triangulation& mesh);
Triangulation read_mesh(std::istream& is);
void write_mesh_file(const std::string& path, const Triangulation& mesh);
Triangulation read_mesh_file(const std::string& path);

}  // namespace insulate
