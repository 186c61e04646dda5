#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <memory>
#include <string>
#include <vector>

#include "shellstab/planar.hpp"
#include "shellstab/profile.hpp"
#include "shellstab/shell.hpp"

namespace shellstab {

// Points are stored in three components; planar bodies ignore the last one.
using Point = Eigen::Vector3d;

double volume(const BoundaryProfile& profile, double base_radius);
double perimeter(const BoundaryProfile& profile, double base_radius);

// Throws PreconditionError unless ||u||_{W^{1,inf}} <= base_radius / 2.
void require_admissible(const BoundaryProfile& profile, double base_radius);

struct ConvexityCheck {
  bool convex = true;
  Point violating_direction = Point::Zero();
};

// n = 2: sign of the polar curvature numerator on a dense grid.
// n = 3: midpoint test on random boundary pairs (seeded).
ConvexityCheck check_convexity(const BoundaryProfile& profile, double base_radius, unsigned seed = 7);

// Star-shaped body {center + r xi : 0 <= r < R + u(xi)} with cached
// boundary data for distance and support queries.
class ConvexBody {
 public:
  ConvexBody(BoundaryProfile profile, double base_radius, const Point& center = Point::Zero());

  int dimension() const { return profile_.dimension(); }
  const BoundaryProfile& profile() const { return profile_; }
  double base_radius() const { return base_radius_; }
  const Point& center() const { return center_; }
  bool is_round() const { return round_; }

  double radius_along(const Point& unit_direction) const;
  bool contains(const Point& x) const;
  double volume() const;
  double perimeter() const;
  double support(const Point& unit_direction) const;
  // Distance from an interior point to the boundary.
  double boundary_distance(const Point& x) const;
  // Planar polygonal approximation (10^4 vertices); n = 2 only.
  const ConvexPolygon& polygon() const;
  Point barycenter() const;

 private:
  double support_planar(double phi) const;
  double planar_distance(const Point2& x) const;
  double support_spatial(const Point& e) const;
  Point boundary_point(double theta, double phi) const;

  BoundaryProfile profile_;
  double base_radius_;
  Point center_;
  bool round_;
  std::shared_ptr<const ConvexPolygon> polygon_;
  // n = 3 boundary sample grid: (theta, phi) and positions.
  int rings_ = 0;
  int azimuths_ = 0;
  std::vector<Point> samples_;
};

// Omega = Omega0 \ closure(Theta), both star-shaped about the origin.
struct HoledDomain {
  ShellGeometry geom;
  BoundaryProfile outer;
  BoundaryProfile inner;
  double theta_min = 0.0;  // 0 selects min{R1, R2 - R1} / 4

  HoledDomain(const ShellGeometry& g, BoundaryProfile u, BoundaryProfile v, double theta = 0.0);
  static HoledDomain shell(const ShellGeometry& g);

  double class_constant() const;
  double outer_volume() const;
  double hole_volume() const;
  double volume() const { return outer_volume() - hole_volume(); }
  double outer_perimeter() const;
  // Minimum radial gap (R2 + u) - (R1 + v) over a dense grid.
  double radial_clearance() const;
  bool in_hole(const Point& x) const;

  // Admissibility bounds and strict inclusion; throws PreconditionError.
  void validate() const;
};

struct ClassMembership {
  bool outer_convex = false;
  bool inner_convex = false;
  double hausdorff_gap = 0.0;  // d_H(Theta, Omega0)
  double hole_inradius = 0.0;
  double threshold = 0.0;
  bool member() const {
    return outer_convex && inner_convex && hausdorff_gap >= threshold && hole_inradius >= threshold;
  }
};

ClassMembership class_membership(const HoledDomain& domain);

// Constant shift u += c restoring P(Omega0) = P(B_{R2}).
BoundaryProfile project_perimeter(const BoundaryProfile& outer, const ShellGeometry& geom);

// Constant shifts u += c0 (outer perimeter) and v += c1 (volume) restoring
// the shell constraints. Throws PreconditionError if the result leaves the
// admissible class.
HoledDomain project_constraints(const HoledDomain& domain);

struct ConstraintResiduals {
  double perimeter = 0.0;  // P(Omega0) - P(B_{R2})
  double volume = 0.0;     // |Omega| - |A|
};
ConstraintResiduals constraint_residuals(const HoledDomain& domain);

// Hausdorff distance of convex bodies via support functions.
double hausdorff_distance(const ConvexBody& a, const ConvexBody& b);

struct AsymmetrySearch {
  double value = 0.0;
  Point best_center = Point::Zero();
  std::vector<std::string> log;
};

// inf_x d_H(Omega0, B_R(x)) / (omega_n R^n) with R = R2.
AsymmetrySearch hausdorff_asymmetry_search(const BoundaryProfile& outer, const ShellGeometry& geom);
double hausdorff_asymmetry(const BoundaryProfile& outer, const ShellGeometry& geom);

// Support-function samples of a body over uniform directions (n = 2) or a
// spherical grid (n = 3); used to evaluate d_H(body, B_R(x)) quickly.
class SupportTable {
 public:
  explicit SupportTable(const ConvexBody& body);
  double distance_to_ball(const Point& center, double radius) const;

 private:
  std::vector<Point> directions_;
  std::vector<double> values_;
};

// Inner parallel set {d > t} of a planar outer body.
ConvexPolygon inner_parallel(const BoundaryProfile& outer, const ShellGeometry& geom, double t);
// Volume of {d > t}; n = 2 and n = 3.
double inner_parallel_volume(const ConvexBody& body, double t);
double inner_parallel_volume(const BoundaryProfile& outer, const ShellGeometry& geom, double t);
double inradius(const ConvexBody& body);

// Level t with |{d > t}| = target_volume. When the outer perimeter matches
// the reference sphere and the target is |Omega0| - |A| (the hole volume
// forced by the volume constraint), t >= R2 - R1 is checked and a
// GeometryError is raised if it fails.
double parallel_level_for_volume(const ConvexBody& body, const ShellGeometry& geom, double target_volume);
double parallel_level_for_volume(const BoundaryProfile& outer, const ShellGeometry& geom, double target_volume);

double distance_to_outer_boundary(const BoundaryProfile& outer, const ShellGeometry& geom, const Point& x);

struct LemmaReport {
  double eps = 0.0;
  // Constraint expansions: raw left-hand sides and the same divided by the
  // squared W^{1,2} size of the profiles.
  double perimeter_expansion = 0.0;
  double volume_expansion = 0.0;
  double perimeter_expansion_ratio = 0.0;
  double volume_expansion_ratio = 0.0;
  // Poincare: ratio ||grad u||^2 / ||u||^2 after removing degrees 0 and 1.
  double poincare_ratio = 0.0;
  double poincare_constant = 0.0;  // 2n
  bool poincare_holds = true;
  // ||grad u||^2 - 2n ||u||^2 for the full profile (reported only).
  double poincare_deficit = 0.0;
  // Sup bound for the mean-free profile: lhs <= rhs.
  double sup_bound_lhs = 0.0;
  double sup_bound_rhs = 0.0;
  bool sup_bound_holds = true;
  // ||grad u||_inf <= 3 ||u||_inf^{1/2}.
  double gradient_bound_lhs = 0.0;
  double gradient_bound_rhs = 0.0;
  bool gradient_bound_holds = true;
};

LemmaReport lemma_checks(const HoledDomain& domain, double eps);

}  // namespace shellstab
