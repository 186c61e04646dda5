#include "shellstab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "shellstab/errors.hpp"

namespace shellstab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

std::pair<int, int> sorted(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

double edge_length_sum(const Mesh2D& mesh, const std::vector<std::array<int, 2>>& edges) {
  double total = 0.0;
  for (const auto& e : edges) {
    total += (mesh.vertices[e[1]] - mesh.vertices[e[0]]).norm();
  }
  return total;
}

void compute_h_max(Mesh2D& mesh) {
  mesh.h_max = 0.0;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      mesh.h_max = std::max(mesh.h_max, (mesh.vertices[t[(k + 1) % 3]] - mesh.vertices[t[k]]).norm());
    }
  }
}

}  // namespace

std::size_t Mesh2D::edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      edges.insert(sorted(t[k], t[(k + 1) % 3]));
    }
  }
  return edges.size();
}

long Mesh2D::euler_characteristic() const {
  return static_cast<long>(vertices.size()) - static_cast<long>(edge_count()) + static_cast<long>(triangles.size());
}

double Mesh2D::outer_boundary_length() const { return edge_length_sum(*this, outer_boundary_edges); }
double Mesh2D::inner_boundary_length() const { return edge_length_sum(*this, inner_boundary_edges); }

double Mesh2D::area() const {
  double total = 0.0;
  for (const auto& t : triangles) {
    total += 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
  }
  return total;
}

void Mesh2D::validate() const {
  const int nv = static_cast<int>(vertices.size());
  std::map<std::pair<int, int>, int> uses;
  for (std::size_t k = 0; k < triangles.size(); ++k) {
    const auto& t = triangles[k];
    for (int v : t) {
      if (v < 0 || v >= nv) {
        throw GeometryError("Mesh2D: triangle " + std::to_string(k) + " references a missing vertex");
      }
    }
    if (!(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]) > 0.0)) {
      throw GeometryError("Mesh2D: triangle " + std::to_string(k) + " is degenerate or inverted");
    }
    for (int e = 0; e < 3; ++e) {
      ++uses[sorted(t[e], t[(e + 1) % 3])];
    }
  }
  std::map<std::pair<int, int>, int> marks;
  for (const auto* list : {&outer_boundary_edges, &inner_boundary_edges}) {
    for (const auto& e : *list) {
      ++marks[sorted(e[0], e[1])];
    }
  }
  for (const auto& [edge, count] : uses) {
    if (count > 2) {
      throw GeometryError("Mesh2D: edge shared by more than two triangles");
    }
    const auto m = marks.find(edge);
    const int marked = m == marks.end() ? 0 : m->second;
    if ((count == 1) != (marked == 1) || marked > 1) {
      std::ostringstream os;
      os << "Mesh2D: edge (" << edge.first << ", " << edge.second << ") has " << count << " triangles and " << marked
         << " boundary markers";
      throw GeometryError(os.str());
    }
  }
  if (marks.size() != outer_boundary_edges.size() + inner_boundary_edges.size()) {
    throw GeometryError("Mesh2D: duplicated boundary marker");
  }
}

Mesh2D mesh_holed_domain(const HoledDomain& domain, const MeshLayout& layout) {
  if (domain.geom.n != 2) {
    throw PreconditionError("mesh_holed_domain: planar domains only");
  }
  if (layout.angular < 3 || layout.radial < 1) {
    throw PreconditionError("mesh_holed_domain: need at least 3 angular and 1 radial cells");
  }
  domain.validate();
  const int na = layout.angular;
  const int nr = layout.radial;
  Mesh2D mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(na) * (nr + 1));
  for (int j = 0; j < na; ++j) {
    const double t = kTwoPi * (j + layout.phase) / na;
    const double r_in = domain.geom.r1 + domain.inner.value_planar(t);
    const double r_out = domain.geom.r2 + domain.outer.value_planar(t);
    if (!(r_out > r_in && r_in > 0.0)) {
      throw GeometryError("mesh_holed_domain: hole and outer curve cross at angle " + std::to_string(t));
    }
    const Eigen::Vector2d e(std::cos(t), std::sin(t));
    for (int i = 0; i <= nr; ++i) {
      const double r = i == nr ? r_out : r_in + (r_out - r_in) * i / nr;
      mesh.vertices.push_back(r * e);
    }
  }
  auto node = [&](int j, int i) { return ((j % na) * (nr + 1)) + i; };
  const bool flip = layout.phase != 0.0;
  for (int j = 0; j < na; ++j) {
    for (int i = 0; i < nr; ++i) {
      const int a = node(j, i);
      const int b = node(j, i + 1);
      const int c = node(j + 1, i + 1);
      const int d = node(j + 1, i);
      // Quad a (inner, this ray), b (outer, this ray), c (outer, next), d (inner, next) is CCW.
      if (((i + j) % 2 == 0) != flip) {
        mesh.triangles.push_back({a, c, b});
        mesh.triangles.push_back({a, d, c});
      } else {
        mesh.triangles.push_back({a, d, b});
        mesh.triangles.push_back({d, c, b});
      }
    }
    mesh.inner_boundary_edges.push_back({node(j, 0), node(j + 1, 0)});
    mesh.outer_boundary_edges.push_back({node(j, nr), node(j + 1, nr)});
  }
  // Fix orientation if the ray ordering is clockwise for this parametrization.
  for (auto& t : mesh.triangles) {
    if (cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]) < 0.0) {
      std::swap(t[1], t[2]);
    }
  }
  compute_h_max(mesh);
  mesh.validate();
  return mesh;
}

MeshLayout layout_for(const HoledDomain& domain, double h_target) {
  if (!(h_target > 0.0)) {
    throw PreconditionError("layout_for: h_target must be positive");
  }
  const double outer = domain.geom.r2 + domain.outer.sup_norm();
  const double gap = domain.radial_clearance();
  const double spread = domain.geom.r2 - domain.geom.r1 + domain.outer.sup_norm() + domain.inner.sup_norm();
  MeshLayout layout;
  layout.angular = std::max(8, static_cast<int>(std::ceil(kTwoPi * outer * std::sqrt(2.0) / h_target)));
  layout.radial = std::max(1, static_cast<int>(std::ceil(std::max(gap, spread) * std::sqrt(2.0) / h_target)));
  for (int attempt = 0; attempt < 20; ++attempt) {
    const Mesh2D mesh = mesh_holed_domain(domain, layout);
    if (mesh.h_max <= h_target) {
      return layout;
    }
    layout.angular = static_cast<int>(std::ceil(layout.angular * 1.1));
    layout.radial = static_cast<int>(std::ceil(layout.radial * 1.1));
  }
  throw GeometryError("layout_for: could not reach the target edge length");
}

Mesh2D mesh_holed_domain(const HoledDomain& domain, double h_target) {
  return mesh_holed_domain(domain, layout_for(domain, h_target));
}

void write_mesh(std::ostream& out, const Mesh2D& mesh) {
  out.precision(17);
  out << "mesh2d 1\n";
  out << "vertices " << mesh.vertices.size() << "\n";
  for (const auto& v : mesh.vertices) {
    out << v.x() << " " << v.y() << "\n";
  }
  out << "triangles " << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles) {
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
  out << "outer " << mesh.outer_boundary_edges.size() << "\n";
  for (const auto& e : mesh.outer_boundary_edges) {
    out << e[0] << " " << e[1] << "\n";
  }
  out << "inner " << mesh.inner_boundary_edges.size() << "\n";
  for (const auto& e : mesh.inner_boundary_edges) {
    out << e[0] << " " << e[1] << "\n";
  }
}

Mesh2D read_mesh(std::istream& in) {
  auto expect = [&](const std::string& word) {
    std::string got;
    std::size_t count = 0;
    if (!(in >> got >> count) || got != word) {
      throw PreconditionError("read_mesh: expected section '" + word + "'");
    }
    return count;
  };
  auto fail = [](const char* what) { throw PreconditionError(std::string("read_mesh: truncated ") + what); };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "mesh2d" || version != 1) {
    throw PreconditionError("read_mesh: not a version 1 mesh2d file");
  }
  Mesh2D mesh;
  mesh.vertices.resize(expect("vertices"));
  for (auto& v : mesh.vertices) {
    if (!(in >> v.x() >> v.y())) {
      fail("vertex list");
    }
  }
  mesh.triangles.resize(expect("triangles"));
  for (auto& t : mesh.triangles) {
    if (!(in >> t[0] >> t[1] >> t[2])) {
      fail("triangle list");
    }
  }
  mesh.outer_boundary_edges.resize(expect("outer"));
  for (auto& e : mesh.outer_boundary_edges) {
    if (!(in >> e[0] >> e[1])) {
      fail("outer edge list");
    }
  }
  mesh.inner_boundary_edges.resize(expect("inner"));
  for (auto& e : mesh.inner_boundary_edges) {
    if (!(in >> e[0] >> e[1])) {
      fail("inner edge list");
    }
  }
  compute_h_max(mesh);
  mesh.validate();
  return mesh;
}

}  // namespace shellstab
