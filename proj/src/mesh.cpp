#include "insulate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "insulate/errors.hpp"

namespace insulate {
namespace {

std::uint64_t edge_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

std::string edge_str(std::size_t a, std::size_t b) {
  std::ostringstream os;
  os << "(" << a << "," << b << ")";
  return os.str();
}

}  // namespace

char label_char(BoundaryLabel l) {
  switch (l) {
    case BoundaryLabel::Insulated: return 'I';
    case BoundaryLabel::Dirichlet: return 'D';
    case BoundaryLabel::Neumann: return 'N';
  }
  return '?';
}

BoundaryLabel label_from_char(char c) {
  switch (c) {
    case 'I': return BoundaryLabel::Insulated;
    case 'D': return BoundaryLabel::Dirichlet;
    case 'N': return BoundaryLabel::Neumann;
    default: throw MeshError(std::string("unknown boundary label '") + c + "'");
  }
}

Triangulation::Triangulation(std::vector<Vec2> vertices, std::vector<Element> elements,
                             const std::vector<LabeledSide>& labels,
                             std::optional<std::vector<int>> refinement_edges, int generation)
    : vertices_(std::move(vertices)), elements_(std::move(elements)), generation_(generation) {
  const std::size_t nv = vertices_.size(), ne = elements_.size();
  if (nv >= (std::size_t(1) << 32)) throw MeshError("too many vertices");

  // duplicate vertices: sweep along x
  {
    std::vector<std::size_t> idx(nv);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return vertices_[a].x < vertices_[b].x; });
    for (std::size_t i = 0; i < nv; ++i)
      for (std::size_t j = i + 1; j < nv && vertices_[idx[j]].x - vertices_[idx[i]].x <= 1e-12; ++j)
        if (norm(vertices_[idx[j]] - vertices_[idx[i]]) <= 1e-12)
          throw MeshError("duplicate vertices " + edge_str(idx[i], idx[j]));
  }

  area_.resize(ne);
  for (std::size_t t = 0; t < ne; ++t) {
    const Element& e = elements_[t];
    for (std::size_t v : e)
      if (v >= nv) throw MeshError("element " + std::to_string(t) + " references vertex " + std::to_string(v));
    if (e[0] == e[1] || e[1] == e[2] || e[0] == e[2])
      throw MeshError("element " + std::to_string(t) + " repeats a vertex");
    const double a = 0.5 * cross(vertices_[e[1]] - vertices_[e[0]], vertices_[e[2]] - vertices_[e[0]]);
    if (!(a > 0.0)) throw MeshError("element " + std::to_string(t) + " is inverted or degenerate");
    area_[t] = a;
  }

  element_sides_.resize(ne);
  side_index_.reserve(3 * ne);
  for (std::size_t t = 0; t < ne; ++t) {
    const Element& e = elements_[t];
    for (int i = 0; i < 3; ++i) {
      const std::size_t a = e[(i + 1) % 3], b = e[(i + 2) % 3];
      auto [it, fresh] = side_index_.try_emplace(edge_key(a, b), sides_.size());
      if (fresh) {
        sides_.push_back({std::min(a, b), std::max(a, b)});
        side_elems_.push_back({t, npos});
      } else {
        auto& adj = side_elems_[it->second];
        if (adj[1] != npos) throw MeshError("non-manifold side " + edge_str(a, b));
        adj[1] = t;
      }
      element_sides_[t][i] = it->second;
    }
  }

  const std::size_t ns = sides_.size();
  length_.resize(ns);
  normal_.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const Vec2 d = vertices_[sides_[s][1]] - vertices_[sides_[s][0]];
    length_[s] = norm(d);
    Vec2 n{d.y / length_[s], -d.x / length_[s]};
    // orient: side_elems_[s][0] must be the element the normal leaves
    const std::size_t t0 = side_elems_[s][0];
    const int li = local_side(t0, s);
    const Vec2 out = side_midpoint(s) - vertices_[elements_[t0][li]];
    if (dot(n, out) < 0.0) {
      if (side_elems_[s][1] == npos) {
        n = -n;
      } else {
        std::swap(side_elems_[s][0], side_elems_[s][1]);
      }
    }
    normal_[s] = n;
  }

  label_.assign(ns, -1);
  for (const LabeledSide& l : labels) {
    const std::size_t s = find_side(l.v0, l.v1);
    if (s == npos) throw MeshError("labeled side " + edge_str(l.v0, l.v1) + " is not a mesh side");
    if (!is_boundary(s)) throw MeshError("labeled side " + edge_str(l.v0, l.v1) + " is interior");
    const int v = static_cast<int>(l.label);
    if (label_[s] != -1 && label_[s] != v)
      throw MeshError("side " + edge_str(l.v0, l.v1) + " carries two labels");
    label_[s] = v;
  }
  for (std::size_t s = 0; s < ns; ++s) {
    if (!is_boundary(s)) continue;
    if (label_[s] < 0) throw MeshError("unlabeled boundary side " + edge_str(sides_[s][0], sides_[s][1]));
    boundary_.push_back(s);
    by_label_[label_[s]].push_back(s);
  }

  if (refinement_edges) {
    if (refinement_edges->size() != ne) throw MeshError("refinement edge list has wrong length");
    for (int r : *refinement_edges)
      if (r < 0 || r > 2) throw MeshError("refinement edge index out of range");
    refinement_edge_ = std::move(*refinement_edges);
  } else {
    refinement_edge_.resize(ne);
    for (std::size_t t = 0; t < ne; ++t) {
      int best = 0;
      for (int i = 1; i < 3; ++i)
        if (length_[element_sides_[t][i]] > length_[element_sides_[t][best]]) best = i;
      refinement_edge_[t] = best;
    }
  }
}

std::optional<BoundaryLabel> Triangulation::label(std::size_t s) const {
  if (label_[s] < 0) return std::nullopt;
  return static_cast<BoundaryLabel>(label_[s]);
}

std::size_t Triangulation::find_side(std::size_t a, std::size_t b) const {
  auto it = side_index_.find(edge_key(a, b));
  return it == side_index_.end() ? npos : it->second;
}

int Triangulation::local_side(std::size_t t, std::size_t s) const {
  for (int i = 0; i < 3; ++i)
    if (element_sides_[t][i] == s) return i;
  return -1;
}

Vec2 Triangulation::barycenter(std::size_t t) const {
  const Element& e = elements_[t];
  return (1.0 / 3.0) * (vertices_[e[0]] + vertices_[e[1]] + vertices_[e[2]]);
}

Vec2 Triangulation::side_midpoint(std::size_t s) const {
  return 0.5 * (vertices_[sides_[s][0]] + vertices_[sides_[s][1]]);
}

double Triangulation::diameter(std::size_t t) const {
  const auto& es = element_sides_[t];
  return std::max({length_[es[0]], length_[es[1]], length_[es[2]]});
}

double Triangulation::domain_area() const {
  return std::accumulate(area_.begin(), area_.end(), 0.0);
}

double Triangulation::mesh_size() const {
  return std::sqrt(domain_area() / static_cast<double>(num_vertices()));
}

double Triangulation::max_diameter() const {
  double h = 0.0;
  for (std::size_t t = 0; t < num_elements(); ++t) h = std::max(h, diameter(t));
  return h;
}

double Triangulation::min_angle() const {
  double amin = M_PI;
  for (const Element& e : elements_) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = vertices_[e[i]];
      const Vec2 u = vertices_[e[(i + 1) % 3]] - p, w = vertices_[e[(i + 2) % 3]] - p;
      amin = std::min(amin, std::atan2(std::abs(cross(u, w)), dot(u, w)));
    }
  }
  return amin;
}

std::vector<LabeledSide> Triangulation::labeled_sides() const {
  std::vector<LabeledSide> out;
  out.reserve(boundary_.size());
  for (std::size_t s : boundary_)
    out.push_back({sides_[s][0], sides_[s][1], static_cast<BoundaryLabel>(label_[s])});
  return out;
}

Triangulation build_mesh(std::vector<Vec2> vertices, std::vector<Element> elements,
                         const std::vector<LabeledSide>& labels) {
  return Triangulation(std::move(vertices), std::move(elements), labels);
}

Triangulation with_vertices(const Triangulation& mesh, std::vector<Vec2> vertices) {
  if (vertices.size() != mesh.num_vertices()) throw MeshError("vertex count mismatch");
  return Triangulation(std::move(vertices), mesh.elements(), mesh.labeled_sides(),
                       mesh.refinement_edges(), mesh.generation());
}

}  // namespace insulate
