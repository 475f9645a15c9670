#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "insulate/errors.hpp"
#include "insulate/mesh.hpp"

namespace insulate {
namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_mesh(std::ostream& os, const Triangulation& mesh) {
  os << "insulate-mesh v1 d=2\n" << mesh.num_vertices() << "\n";
  for (const Vec2& p : mesh.vertices()) os << fmt17(p.x) << " " << fmt17(p.y) << "\n";
  os << mesh.num_elements() << "\n";
  for (const Element& e : mesh.elements()) os << e[0] << " " << e[1] << " " << e[2] << "\n";
  const auto labels = mesh.labeled_sides();
  os << labels.size() << "\n";
  for (const LabeledSide& l : labels) os << l.v0 << " " << l.v1 << " " << label_char(l.label) << "\n";
}

Triangulation read_mesh(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header.rfind("insulate-mesh v1 d=2", 0) != 0) throw MeshError("bad mesh header: '" + header + "'");
  auto fail = [](const char* what) { return MeshError(std::string("malformed mesh file: ") + what); };
  std::size_t nv = 0, ne = 0, nb = 0;
  if (!(is >> nv)) throw fail("vertex count");
  std::vector<Vec2> v(nv);
  for (auto& p : v)
    if (!(is >> p.x >> p.y)) throw fail("vertex coordinates");
  if (!(is >> ne)) throw fail("element count");
  std::vector<Element> e(ne);
  for (auto& t : e)
    if (!(is >> t[0] >> t[1] >> t[2])) throw fail("element indices");
  if (!(is >> nb)) throw fail("boundary side count");
  std::vector<LabeledSide> labels(nb);
  for (auto& l : labels) {
    char c = 0;
    if (!(is >> l.v0 >> l.v1 >> c)) throw fail("boundary side");
    l.label = label_from_char(c);
  }
  return Triangulation(std::move(v), std::move(e), labels);
}

void write_mesh_file(const std::string& path, const Triangulation& mesh) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path);
  write_mesh(os, mesh);
}

Triangulation read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path);
  return read_mesh(is);
}

}  // namespace insulate
