#pragma once

#include <Eigen/Core>
#include <array>
#include <iosfwd>
#include <vector>

#include "shellstab/domains.hpp"

namespace shellstab {

// Conforming triangulation of a planar holed domain with marked boundary
// edges.
struct Mesh2D {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> outer_boundary_edges;
  std::vector<std::array<int, 2>> inner_boundary_edges;
  double h_max = 0.0;

  std::size_t edge_count() const;
  // V - E + F with F the triangle count.
  long euler_characteristic() const;
  double outer_boundary_length() const;
  double inner_boundary_length() const;
  double area() const;
  // Positive orientation and single marking of every boundary edge; throws
  // GeometryError.
  void validate() const;
};

struct MeshLayout {
  int angular = 64;
  int radial = 8;
  // Rotates the angular grid by this fraction of a cell and flips the
  // diagonal pattern, giving an unrelated meshing of the same domain.
  double phase = 0.0;
};

// Structured mesh mapped between the hole and outer curves: node (j, i) sits
// at r = r_in + (i / radial) (r_out - r_in) along angle 2 pi (j + phase) / angular.
Mesh2D mesh_holed_domain(const HoledDomain& domain, const MeshLayout& layout);
// Smallest layout, with the angular/radial ratio of the domain, whose longest
// edge is at most h_target.
MeshLayout layout_for(const HoledDomain& domain, double h_target);
Mesh2D mesh_holed_domain(const HoledDomain& domain, double h_target);

void write_mesh(std::ostream& out, const Mesh2D& mesh);
Mesh2D read_mesh(std::istream& in);

}  // namespace shellstab
