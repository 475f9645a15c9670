#include <cmath>

#include "insulate/mesh.hpp"

namespace insulate {

Triangulation generate_square(int n, const std::function<BoundaryLabel(Vec2)>& labeler) {
  std::vector<Vec2> v;
  std::vector<Element> e;
  const auto id = [n](int i, int j) { return static_cast<std::size_t>(j * (n + 1) + i); };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.push_back({double(i) / n, double(j) / n});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      e.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      e.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  std::vector<LabeledSide> labels;
  auto add = [&](std::size_t a, std::size_t b) {
    const Vec2 m = 0.5 * (v[a] + v[b]);
    labels.push_back({a, b, labeler ? labeler(m) : BoundaryLabel::Insulated});
  };
  for (int i = 0; i < n; ++i) {
    add(id(i, 0), id(i + 1, 0));
    add(id(n, i), id(n, i + 1));
    add(id(i, n), id(i + 1, n));
    add(id(0, i), id(0, i + 1));
  }
  return Triangulation(std::move(v), std::move(e), labels);
}

Triangulation generate_lshape(int level, LShapeSetup setup) {
  std::vector<Vec2> v = {{-1, -1}, {0, -1}, {-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  std::vector<Element> e = {{0, 1, 3}, {0, 3, 2}, {2, 3, 5}, {3, 6, 5}, {3, 4, 7}, {3, 7, 6}};
  const std::size_t loop[9] = {0, 1, 3, 4, 7, 6, 5, 2, 0};
  std::vector<LabeledSide> labels;
  for (int k = 0; k < 8; ++k) {
    BoundaryLabel l = BoundaryLabel::Insulated;
    if (setup == LShapeSetup::MixedBoundary) {
      if (loop[k] == 3 && loop[k + 1] == 4) l = BoundaryLabel::Dirichlet;
      if (loop[k] == 1 && loop[k + 1] == 3) l = BoundaryLabel::Neumann;
    }
    labels.push_back({loop[k], loop[k + 1], l});
  }
  Triangulation mesh(std::move(v), std::move(e), labels);
  for (int k = 0; k < level; ++k) mesh = uniform_refine(mesh);
  return mesh;
}

Triangulation generate_annulus(int level) {
  constexpr int sectors = 12;
  const double radii[3] = {0.5, 0.75, 1.0};
  std::vector<Vec2> v;
  for (double r : radii)
    for (int j = 0; j < sectors; ++j) {
      const double phi = 2.0 * M_PI * j / sectors;
      v.push_back({r * std::cos(phi), r * std::sin(phi)});
    }
  const auto id = [](int ring, int j) {
    return static_cast<std::size_t>(ring * sectors + (j % sectors));
  };
  std::vector<Element> e;
  std::vector<int> ref;
  for (int ring = 0; ring < 2; ++ring)
    for (int j = 0; j < sectors; ++j) {
      // quad (ring,j) (ring+1,j) (ring+1,j+1) (ring,j+1), diagonal (ring,j)-(ring+1,j+1)
      e.push_back({id(ring, j), id(ring + 1, j + 1), id(ring, j + 1)});
      ref.push_back(2);
      e.push_back({id(ring, j), id(ring + 1, j), id(ring + 1, j + 1)});
      ref.push_back(1);
    }
  std::vector<LabeledSide> labels;
  for (int j = 0; j < sectors; ++j) {
    labels.push_back({id(0, j), id(0, j + 1), BoundaryLabel::Insulated});
    labels.push_back({id(2, j), id(2, j + 1), BoundaryLabel::Insulated});
  }
  Triangulation mesh(std::move(v), std::move(e), labels, std::move(ref));
  for (int k = 0; k < level; ++k) {
    mesh = uniform_refine(mesh);
    std::vector<Vec2> pts = mesh.vertices();
    for (std::size_t s : mesh.boundary_sides())
      for (std::size_t p : mesh.side(s)) {
        const double r = norm(pts[p]);
        const double target = r < 0.75 ? 0.5 : 1.0;
        pts[p] = (target / r) * pts[p];
      }
    mesh = with_vertices(mesh, std::move(pts));
  }
  return mesh;
}

}  // namespace insulate
