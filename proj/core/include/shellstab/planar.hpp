#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "shellstab/profile.hpp"

namespace shellstab {

using Point2 = Eigen::Vector2d;

// Convex polygon with counter-clockwise vertices.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point2> vertices);

  // Polygon through `vertices` points of the curve center + (R + u(t)) e(t).
  static ConvexPolygon from_profile(const BoundaryProfile& profile, double base_radius, int vertices = 10000,
                                    const Point2& center = Point2::Zero());
  static ConvexPolygon square(double side, const Point2& center = Point2::Zero());

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double area() const;
  double perimeter() const;
  Point2 centroid() const;
  bool contains(const Point2& x) const;
  // Distance to the boundary for a point inside the polygon.
  double boundary_distance(const Point2& x) const;
  // Minimum of offset - normal.x over the edges: negative outside, no throw.
  double boundary_gap(const Point2& x) const;
  // Edge attaining boundary_gap (edge i joins vertices i and i + 1).
  std::pair<std::size_t, double> nearest_edge(const Point2& x) const;
  double support(const Point2& direction) const;

  // {x : d(x, complement) >= t}; throws GeometryError when empty.
  ConvexPolygon inward_offset(double t) const;
  double inradius() const;

 private:
  void build_edges();

  std::vector<Point2> vertices_;
  std::vector<Point2> normals_;   // outward unit normals
  std::vector<double> offsets_;   // normal . x <= offset
  std::vector<int> coarse_;       // edge indices sampled for fast distance queries
};

// True when r^2 + 2 r'^2 - r r'' > 0 everywhere on a dense angle grid, i.e.
// the polar curve R + u is strictly convex.
bool is_convex_planar(const BoundaryProfile& profile, double base_radius, double tolerance = 0.0);

}  // namespace shellstab
