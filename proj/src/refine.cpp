#include <algorithm>

#include "insulate/errors.hpp"
#include "insulate/mesh.hpp"

namespace insulate {
namespace {

struct Bisector {
  const Triangulation& mesh;
  const std::vector<char>& marked;  // per old side
  std::vector<std::size_t> midpoint;  // per old side, new vertex index
  std::vector<Vec2> vertices;
  std::vector<Element> elements;

  std::size_t mid(std::size_t a, std::size_t b) const {
    const std::size_t s = mesh.find_side(a, b);
    return (s != npos && marked[s]) ? midpoint[s] : npos;
  }

  // (a,b,c) with refinement edge (a,b); children keep the newest vertex last.
  void bisect(std::size_t a, std::size_t b, std::size_t c) {
    const std::size_t p = mid(a, b);
    if (p == npos) {
      elements.push_back({a, b, c});
      return;
    }
    bisect(c, a, p);
    bisect(b, c, p);
  }
};

Triangulation refine_edges(const Triangulation& mesh, std::vector<char> marked) {
  const std::size_t ne = mesh.num_elements();
  // closure: any marked edge forces the refinement edge
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t t = 0; t < ne; ++t) {
      const auto& es = mesh.element_sides(t);
      const std::size_t r = es[mesh.refinement_edge(t)];
      if (marked[r]) continue;
      if (marked[es[0]] || marked[es[1]] || marked[es[2]]) {
        marked[r] = 1;
        changed = true;
      }
    }
  }
  if (std::none_of(marked.begin(), marked.end(), [](char c) { return c != 0; })) return mesh;

  Bisector b{mesh, marked, std::vector<std::size_t>(mesh.num_sides(), npos), mesh.vertices(), {}};
  for (std::size_t s = 0; s < mesh.num_sides(); ++s) {
    if (!marked[s]) continue;
    b.midpoint[s] = b.vertices.size();
    b.vertices.push_back(mesh.side_midpoint(s));
  }
  b.elements.reserve(4 * ne);
  for (std::size_t t = 0; t < ne; ++t) {
    const Element& e = mesh.element(t);
    const int r = mesh.refinement_edge(t);
    b.bisect(e[(r + 1) % 3], e[(r + 2) % 3], e[r]);
  }

  std::vector<LabeledSide> labels;
  for (std::size_t s : mesh.boundary_sides()) {
    const auto [v0, v1] = mesh.side(s);
    const BoundaryLabel l = *mesh.label(s);
    if (marked[s]) {
      labels.push_back({v0, b.midpoint[s], l});
      labels.push_back({b.midpoint[s], v1, l});
    } else {
      labels.push_back({v0, v1, l});
    }
  }
  std::vector<int> ref(b.elements.size(), 2);
  return Triangulation(std::move(b.vertices), std::move(b.elements), labels, std::move(ref),
                       mesh.generation() + 1);
}

}  // namespace

Triangulation refine_nvb(const Triangulation& mesh, const std::vector<std::size_t>& marked) {
  std::vector<char> edges(mesh.num_sides(), 0);
  for (std::size_t t : marked) {
    if (t >= mesh.num_elements()) throw MeshError("marked element " + std::to_string(t) + " out of range");
    edges[mesh.element_sides(t)[mesh.refinement_edge(t)]] = 1;
  }
  return refine_edges(mesh, std::move(edges));
}

Triangulation uniform_refine(const Triangulation& mesh) {
  return refine_edges(mesh, std::vector<char>(mesh.num_sides(), 1));
}

}  // namespace insulate
