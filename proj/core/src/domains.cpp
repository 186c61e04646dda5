#include "shellstab/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "shellstab/errors.hpp"
#include "shellstab/numerics.hpp"

namespace shellstab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPolygonVertices = 10000;

Point unit_vector(double theta, double phi) {
  return Point(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
}

Point planar_unit(double t) { return Point(std::cos(t), std::sin(t), 0.0); }

std::pair<double, double> spherical_angles(const Point& e) {
  const double theta = std::acos(std::clamp(e.z() / e.norm(), -1.0, 1.0));
  return {theta, std::atan2(e.y(), e.x())};
}

double profile_at(const BoundaryProfile& u, const Point& e) {
  if (u.dimension() == 2) {
    return u.value_planar(std::atan2(e.y(), e.x()));
  }
  const auto [theta, phi] = spherical_angles(e);
  return u.spherical_jet(theta, phi).value;
}

double unchecked_volume(const BoundaryProfile& u, double radius) {
  const auto s = u.sample();
  const int n = u.dimension();
  double total = 0.0;
  for (std::size_t i = 0; i < s.value.size(); ++i) {
    total += s.weight[i] * std::pow(radius + s.value[i], n);
  }
  return total / n;
}

double unchecked_perimeter(const BoundaryProfile& u, double radius) {
  const auto s = u.sample();
  const int n = u.dimension();
  double total = 0.0;
  for (std::size_t i = 0; i < s.value.size(); ++i) {
    const double r = radius + s.value[i];
    total += s.weight[i] * std::pow(r, n - 2) * std::sqrt(r * r + s.grad_sq[i]);
  }
  return total;
}

// Roughly uniform directions on S^2.
std::vector<Point> fibonacci_directions(int count) {
  std::vector<Point> out(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(1.0 - z * z);
    out[i] = Point(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return out;
}

std::vector<double> to_vec(const Point& p, int n) {
  return n == 2 ? std::vector<double>{p.x(), p.y()} : std::vector<double>{p.x(), p.y(), p.z()};
}

Point from_vec(const std::vector<double>& v) {
  return Point(v[0], v[1], v.size() > 2 ? v[2] : 0.0);
}

// Maximizer of the (concave) distance-to-boundary function.
Point chebyshev_center(const ConvexBody& body) {
  const int n = body.dimension();
  const Point start = body.barycenter();
  auto objective = [&](const std::vector<double>& v) {
    const Point x = from_vec(v);
    if (!body.contains(x)) {
      return 1e3 + (x - start).norm();
    }
    return -body.boundary_distance(x);
  };
  const auto result =
      numerics::nelder_mead(objective, to_vec(start, n), 0.1 * body.base_radius(), 1e-10 * body.base_radius());
  return from_vec(result.x);
}

double min_curvature_radius(const BoundaryProfile& u, double radius) {
  const int samples = std::max(4096, 64 * (u.degree() + 1));
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const auto jet = u.planar_jet(2.0 * kPi * j / samples);
    const double r = radius + jet.value;
    const double denom = r * r + 2.0 * jet.d1 * jet.d1 - r * jet.d2;
    if (denom <= 0.0) {
      return 0.0;
    }
    best = std::min(best, std::pow(r * r + jet.d1 * jet.d1, 1.5) / denom);
  }
  return best;
}

std::string format_point(const Point& p, int n) {
  std::ostringstream os;
  os << "(" << p.x() << ", " << p.y();
  if (n == 3) {
    os << ", " << p.z();
  }
  os << ")";
  return os.str();
}

// Volume of {d > t} for a spatial body by radial integration about an
// interior point c of the level set.
double spatial_parallel_volume(const ConvexBody& body, const Point& c, double t) {
  const auto q = sphere_quadrature(3, 10);
  double total = 0.0;
  for (std::size_t i = 0; i < q.weight.size(); ++i) {
    const Point e = unit_vector(q.theta[i], q.phi[i]);
    double hi = body.base_radius();
    while (body.contains(c + hi * e)) {
      hi *= 1.5;
    }
    auto level = [&](double rho) {
      const Point x = c + rho * e;
      return (body.contains(x) ? body.boundary_distance(x) : 0.0) - t;
    };
    std::uintmax_t iterations = 100;
    const auto bracket = boost::math::tools::toms748_solve(level, 0.0, hi, boost::math::tools::eps_tolerance<double>(42),
                                                           iterations);
    const double rho = 0.5 * (bracket.first + bracket.second);
    total += q.weight[i] * rho * rho * rho / 3.0;
  }
  return total;
}

}  // namespace

double volume(const BoundaryProfile& profile, double base_radius) {
  require_admissible(profile, base_radius);
  return unchecked_volume(profile, base_radius);
}

double perimeter(const BoundaryProfile& profile, double base_radius) {
  require_admissible(profile, base_radius);
  return unchecked_perimeter(profile, base_radius);
}

void require_admissible(const BoundaryProfile& profile, double base_radius) {
  if (!(base_radius > 0.0)) {
    throw PreconditionError("base radius must be positive");
  }
  const double norm = profile.w1inf_norm();
  if (norm > 0.5 * base_radius) {
    std::ostringstream os;
    os << "profile W^{1,inf} norm " << norm << " exceeds half the base radius " << 0.5 * base_radius;
    throw PreconditionError(os.str());
  }
}

ConvexityCheck check_convexity(const BoundaryProfile& profile, double base_radius, unsigned seed) {
  ConvexityCheck out;
  if (profile.dimension() == 2) {
    const int samples = std::max(4096, 64 * (profile.degree() + 1));
    for (int j = 0; j < samples; ++j) {
      const double t = 2.0 * kPi * j / samples;
      const auto jet = profile.planar_jet(t);
      const double r = base_radius + jet.value;
      if (r * r + 2.0 * jet.d1 * jet.d1 - r * jet.d2 <= 0.0) {
        out.convex = false;
        out.violating_direction = planar_unit(t);
        return out;
      }
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto point_at = [&](const Point& e) { return e * (base_radius + profile_at(profile, e)); };
  // Pairs at a range of angular separations so that local concavities are seen.
  const double separations[] = {0.02, 0.08, 0.3, 1.0, 3.0};
  for (int trial = 0; trial < 20000; ++trial) {
    const double z = 2.0 * unit(rng) - 1.0;
    const double phi = 2.0 * kPi * unit(rng);
    const Point e1 = unit_vector(std::acos(z), phi);
    Point tangent = e1.cross(Point(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5));
    if (tangent.norm() < 1e-6) {
      continue;
    }
    tangent.normalize();
    const double angle = separations[trial % 5];
    const Point e2 = std::cos(angle) * e1 + std::sin(angle) * tangent;
    const Point m = 0.5 * (point_at(e1) + point_at(e2));
    const double r = m.norm();
    if (r == 0.0) {
      continue;
    }
    if (r >= base_radius + profile_at(profile, m / r)) {
      out.convex = false;
      out.violating_direction = m / r;
      return out;
    }
  }
  return out;
}

ConvexBody::ConvexBody(BoundaryProfile profile, double base_radius, const Point& center)
    : profile_(std::move(profile)), base_radius_(base_radius), center_(center), round_(profile_.is_constant()) {
  if (!(base_radius_ + profile_.mean() > 0.0)) {
    throw PreconditionError("ConvexBody: non-positive mean radius");
  }
  if (dimension() == 2) {
    center_.z() = 0.0;
    polygon_ = std::make_shared<const ConvexPolygon>(
        ConvexPolygon::from_profile(profile_, base_radius_, kPolygonVertices, Point2(center_.x(), center_.y())));
    return;
  }
  rings_ = 48;
  azimuths_ = 96;
  samples_.reserve(rings_ * azimuths_);
  for (int i = 0; i < rings_; ++i) {
    const double theta = kPi * (i + 0.5) / rings_;
    for (int j = 0; j < azimuths_; ++j) {
      samples_.push_back(boundary_point(theta, 2.0 * kPi * j / azimuths_));
    }
  }
}

Point ConvexBody::boundary_point(double theta, double phi) const {
  if (dimension() == 2) {
    return center_ + planar_unit(theta) * (base_radius_ + profile_.value_planar(theta));
  }
  return center_ + unit_vector(theta, phi) * (base_radius_ + profile_.spherical_jet(theta, phi).value);
}

double ConvexBody::radius_along(const Point& unit_direction) const {
  return base_radius_ + profile_at(profile_, unit_direction);
}

bool ConvexBody::contains(const Point& x) const {
  Point y = x - center_;
  if (dimension() == 2) {
    y.z() = 0.0;
  }
  const double r = y.norm();
  if (r == 0.0) {
    return true;
  }
  return r < radius_along(y / r);
}

double ConvexBody::volume() const { return unchecked_volume(profile_, base_radius_); }

double ConvexBody::perimeter() const { return unchecked_perimeter(profile_, base_radius_); }

Point ConvexBody::barycenter() const {
  const auto q = profile_.quadrature();
  const auto s = profile_.sample();
  const int n = dimension();
  Point moment = Point::Zero();
  double vol = 0.0;
  for (std::size_t i = 0; i < s.value.size(); ++i) {
    const double r = base_radius_ + s.value[i];
    const Point e = n == 2 ? planar_unit(q.theta[i]) : unit_vector(q.theta[i], q.phi[i]);
    moment += s.weight[i] * std::pow(r, n + 1) / (n + 1) * e;
    vol += s.weight[i] * std::pow(r, n) / n;
  }
  return center_ + moment / vol;
}

const ConvexPolygon& ConvexBody::polygon() const {
  if (!polygon_) {
    throw PreconditionError("ConvexBody::polygon: planar bodies only");
  }
  return *polygon_;
}

double ConvexBody::support_planar(double phi) const {
  const Point e = planar_unit(phi);
  if (round_) {
    return center_.dot(e) + base_radius_ + profile_.mean();
  }
  // Vertex heights along e are unimodal around a convex polygon: coarse
  // stride scan, then an exhaustive pass near the coarse maximum.
  const auto& verts = polygon_->vertices();
  const std::size_t count = verts.size();
  const std::size_t stride = 64;
  auto height = [&](std::size_t i) { return verts[i % count].x() * e.x() + verts[i % count].y() * e.y(); };
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; i += stride) {
    const double v = height(i);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const std::size_t center = best + count;
  for (std::size_t i = center - stride; i <= center + stride; ++i) {
    const double v = height(i);
    if (v > best_value) {
      best_value = v;
      best = i % count;
    }
  }
  const double dt = 2.0 * kPi / static_cast<double>(verts.size());
  const double t0 = dt * static_cast<double>(best);
  const auto refined = numerics::golden_maximize(
      [&](double t) { return boundary_point(t, 0.0).dot(e); }, t0 - dt, t0 + dt, 1e-12);
  return std::max(best_value, refined.second);
}

double ConvexBody::support_spatial(const Point& e) const {
  if (round_) {
    return center_.dot(e) + base_radius_ + profile_.mean();
  }
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double v = samples_[i].dot(e);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double theta0 = kPi * (static_cast<double>(best / azimuths_) + 0.5) / rings_;
  const double phi0 = 2.0 * kPi * static_cast<double>(best % azimuths_) / azimuths_;
  const auto result = numerics::nelder_mead(
      [&](const std::vector<double>& a) { return -boundary_point(a[0], a[1]).dot(e); }, {theta0, phi0},
      0.5 * kPi / rings_, 1e-10, 400);
  return std::max(best_value, -result.value);
}

double ConvexBody::support(const Point& unit_direction) const {
  if (dimension() == 2) {
    return support_planar(std::atan2(unit_direction.y(), unit_direction.x()));
  }
  return support_spatial(unit_direction);
}

double ConvexBody::boundary_distance(const Point& x) const {
  if (!contains(x)) {
    Point y = x - center_;
    if (dimension() == 2) {
      y.z() = 0.0;
    }
    const double r = y.norm();
    if (r > 0.0 && r > radius_along(y / r) * (1.0 + 1e-12)) {
      throw PreconditionError("boundary_distance: point " + format_point(x, dimension()) + " lies outside the body");
    }
    return 0.0;
  }
  if (round_) {
    Point y = x - center_;
    if (dimension() == 2) {
      y.z() = 0.0;
    }
    return std::max(0.0, base_radius_ + profile_.mean() - y.norm());
  }
  if (dimension() == 2) {
    return planar_distance(Point2(x.x(), x.y()));
  }
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double v = (samples_[i] - x).squaredNorm();
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double theta0 = kPi * (static_cast<double>(best / azimuths_) + 0.5) / rings_;
  const double phi0 = 2.0 * kPi * static_cast<double>(best % azimuths_) / azimuths_;
  const auto result = numerics::nelder_mead(
      [&](const std::vector<double>& a) { return (boundary_point(a[0], a[1]) - x).squaredNorm(); }, {theta0, phi0},
      0.5 * kPi / rings_, 1e-10, 400);
  return std::sqrt(std::min(best_value, result.value));
}

// Distance to the polygon, then Newton on the polar angle of the nearest
// point of the exact curve, started at the nearest polygon edge.
double ConvexBody::planar_distance(const Point2& x) const {
  const auto [edge, gap] = polygon_->nearest_edge(x);
  if (gap <= 0.0) {
    return 0.0;
  }
  const auto& verts = polygon_->vertices();
  const Point2 c(center_.x(), center_.y());
  const Point2 mid = 0.5 * (verts[edge] + verts[(edge + 1) % verts.size()]) - c;
  const Point2 y = x - c;
  double theta = std::atan2(mid.y(), mid.x());
  const double max_step = 8.0 * kPi / verts.size();
  double best = gap;
  for (int iter = 0; iter < 6; ++iter) {
    const auto jet = profile_.planar_jet(theta);
    const double rho = base_radius_ + jet.value;
    const Point2 e(std::cos(theta), std::sin(theta));
    const Point2 perp(-e.y(), e.x());
    const Point2 b = rho * e;
    const Point2 b1 = jet.d1 * e + rho * perp;
    const Point2 b2 = (jet.d2 - rho) * e + 2.0 * jet.d1 * perp;
    const Point2 diff = y - b;
    best = diff.norm();
    const double g1 = -diff.dot(b1);
    const double g2 = b1.dot(b1) - diff.dot(b2);
    if (!(g2 > 0.0)) {
      break;
    }
    const double step = std::clamp(-g1 / g2, -max_step, max_step);
    theta += step;
    if (std::abs(step) < 1e-15) {
      break;
    }
  }
  // The inscribed polygon lies inside the body, so the exact distance is at
  // least the polygon gap and exceeds it by at most the sagitta.
  const double slack = 1e-5 * base_radius_;
  return best >= gap - 1e-12 && best <= gap + slack ? best : gap;
}

HoledDomain::HoledDomain(const ShellGeometry& g, BoundaryProfile u, BoundaryProfile v, double theta)
    : geom(g), outer(std::move(u)), inner(std::move(v)), theta_min(theta) {
  geom.validate();
  if (outer.dimension() != geom.n || inner.dimension() != geom.n) {
    throw PreconditionError("HoledDomain: profile dimension differs from the geometry");
  }
}

HoledDomain HoledDomain::shell(const ShellGeometry& g) {
  return HoledDomain(g, BoundaryProfile::zero(g.n), BoundaryProfile::zero(g.n));
}

double HoledDomain::class_constant() const {
  return theta_min > 0.0 ? theta_min : 0.25 * std::min(geom.r1, geom.r2 - geom.r1);
}

double HoledDomain::outer_volume() const { return unchecked_volume(outer, geom.r2); }
double HoledDomain::hole_volume() const { return unchecked_volume(inner, geom.r1); }
double HoledDomain::outer_perimeter() const { return unchecked_perimeter(outer, geom.r2); }

double HoledDomain::radial_clearance() const {
  double best = std::numeric_limits<double>::infinity();
  if (geom.n == 2) {
    const int samples = std::max(4096, 64 * (std::max(outer.degree(), inner.degree()) + 1));
    for (int j = 0; j < samples; ++j) {
      const double t = 2.0 * kPi * j / samples;
      best = std::min(best, geom.r2 + outer.value_planar(t) - geom.r1 - inner.value_planar(t));
    }
    return best;
  }
  const int rings = 64;
  for (int i = 0; i < rings; ++i) {
    const double theta = kPi * (i + 0.5) / rings;
    for (int j = 0; j < 2 * rings; ++j) {
      const double phi = kPi * j / rings;
      best = std::min(best, geom.r2 + outer.spherical_jet(theta, phi).value - geom.r1 -
                                inner.spherical_jet(theta, phi).value);
    }
  }
  return best;
}

bool HoledDomain::in_hole(const Point& x) const {
  Point y = x;
  if (geom.n == 2) {
    y.z() = 0.0;
  }
  const double r = y.norm();
  return r == 0.0 || r < geom.r1 + profile_at(inner, y / r);
}

void HoledDomain::validate() const {
  geom.validate();
  const double nu = outer.w1inf_norm();
  const double nv = inner.w1inf_norm();
  std::ostringstream os;
  if (!(nu < 0.5 * geom.r2)) {
    os << "outer profile W^{1,inf} norm " << nu << " is not below R2/2 = " << 0.5 * geom.r2;
    throw PreconditionError(os.str());
  }
  if (!(nv <= 0.5 * geom.r1)) {
    os << "inner profile W^{1,inf} norm " << nv << " exceeds R1/2 = " << 0.5 * geom.r1;
    throw PreconditionError(os.str());
  }
  const double gap = radial_clearance();
  if (!(gap > 0.0)) {
    os << "hole touches or crosses the outer boundary (minimum radial clearance " << gap << ")";
    throw PreconditionError(os.str());
  }
}

ClassMembership class_membership(const HoledDomain& domain) {
  ClassMembership out;
  out.threshold = domain.class_constant();
  out.outer_convex = check_convexity(domain.outer, domain.geom.r2).convex;
  out.inner_convex = check_convexity(domain.inner, domain.geom.r1).convex;
  const ConvexBody outer(domain.outer, domain.geom.r2);
  const ConvexBody inner(domain.inner, domain.geom.r1);
  if (out.outer_convex && out.inner_convex) {
    out.hausdorff_gap = hausdorff_distance(inner, outer);
  }
  out.hole_inradius = inradius(inner);
  return out;
}

ConstraintResiduals constraint_residuals(const HoledDomain& domain) {
  ConstraintResiduals out;
  out.perimeter = domain.outer_perimeter() - domain.geom.outer_sphere_area();
  out.volume = domain.volume() - domain.geom.shell_volume();
  return out;
}

namespace {

double perimeter_shift(const BoundaryProfile& outer, const ShellGeometry& g) {
  const double target_perimeter = g.outer_sphere_area();
  auto perimeter_residual = [&](double c) { return unchecked_perimeter(outer.shifted(c), g.r2) - target_perimeter; };
  if (perimeter_residual(0.0) == 0.0) {
    return 0.0;
  }
  try {
    return numerics::bisect(perimeter_residual, -0.5 * g.r2, 0.5 * g.r2, 1e-16 * g.r2);
  } catch (const ConvergenceError&) {
    throw PreconditionError("no constant shift in [-R2/2, R2/2] restores the outer perimeter");
  }
}

}  // namespace

BoundaryProfile project_perimeter(const BoundaryProfile& outer, const ShellGeometry& geom) {
  geom.validate();
  return outer.shifted(perimeter_shift(outer, geom));
}

HoledDomain project_constraints(const HoledDomain& domain) {
  const ShellGeometry& g = domain.geom;
  const double c0 = perimeter_shift(domain.outer, g);
  BoundaryProfile u = domain.outer.shifted(c0);
  const double target_hole = unchecked_volume(u, g.r2) - g.shell_volume();
  if (!(target_hole > 0.0)) {
    throw PreconditionError("project_constraints: outer body too small for the shell volume");
  }
  auto volume_residual = [&](double c) { return unchecked_volume(domain.inner.shifted(c), g.r1) - target_hole; };
  double c1 = 0.0;
  if (volume_residual(0.0) != 0.0) {
    try {
      c1 = numerics::bisect(volume_residual, -0.5 * g.r1, g.r2 - g.r1, 1e-16 * g.r2);
    } catch (const ConvergenceError&) {
      throw PreconditionError("project_constraints: no hole shift in [-R1/2, R2 - R1] restores the volume");
    }
  }
  HoledDomain out(g, std::move(u), domain.inner.shifted(c1), domain.theta_min);
  try {
    out.validate();
  } catch (const PreconditionError& e) {
    std::ostringstream os;
    os << "project_constraints: shifts c0 = " << c0 << ", c1 = " << c1 << " leave the admissible class: " << e.what();
    throw PreconditionError(os.str());
  }
  return out;
}

double hausdorff_distance(const ConvexBody& a, const ConvexBody& b) {
  if (a.dimension() != b.dimension()) {
    throw PreconditionError("hausdorff_distance: dimension mismatch");
  }
  const int n = a.dimension();
  for (const ConvexBody* body : {&a, &b}) {
    const auto check = check_convexity(body->profile(), body->base_radius());
    if (!check.convex) {
      throw GeometryError("hausdorff_distance: body is not convex near direction " +
                          format_point(check.violating_direction, n));
    }
  }
  if (n == 2) {
    const int count = 2048;
    double best = 0.0;
    double best_phi = 0.0;
    for (int j = 0; j < count; ++j) {
      const double phi = 2.0 * kPi * j / count;
      const Point e = planar_unit(phi);
      const double gap = std::abs(a.support(e) - b.support(e));
      if (gap > best) {
        best = gap;
        best_phi = phi;
      }
    }
    const double dphi = 2.0 * kPi / count;
    const auto refined = numerics::golden_maximize(
        [&](double phi) {
          const Point e = planar_unit(phi);
          return std::abs(a.support(e) - b.support(e));
        },
        best_phi - dphi, best_phi + dphi, 1e-10);
    return std::max(best, refined.second);
  }
  const auto dirs = fibonacci_directions(2000);
  double best = 0.0;
  Point best_dir = dirs.front();
  for (const Point& e : dirs) {
    const double gap = std::abs(a.support(e) - b.support(e));
    if (gap > best) {
      best = gap;
      best_dir = e;
    }
  }
  const auto [theta0, phi0] = spherical_angles(best_dir);
  const auto refined = numerics::nelder_mead(
      [&](const std::vector<double>& v) {
        const Point e = unit_vector(v[0], v[1]);
        return -std::abs(a.support(e) - b.support(e));
      },
      {theta0, phi0}, 0.05, 1e-8, 300);
  return std::max(best, -refined.value);
}

SupportTable::SupportTable(const ConvexBody& body) {
  if (body.dimension() == 2) {
    const int count = 4096;
    for (int j = 0; j < count; ++j) {
      directions_.push_back(planar_unit(2.0 * kPi * j / count));
    }
  } else {
    directions_ = fibonacci_directions(2000);
  }
  values_.reserve(directions_.size());
  for (const Point& e : directions_) {
    values_.push_back(body.support(e));
  }
}

double SupportTable::distance_to_ball(const Point& center, double radius) const {
  double best = 0.0;
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    best = std::max(best, std::abs(values_[i] - center.dot(directions_[i]) - radius));
  }
  return best;
}

AsymmetrySearch hausdorff_asymmetry_search(const BoundaryProfile& outer, const ShellGeometry& geom) {
  geom.validate();
  const double target = geom.outer_sphere_area();
  const double p = unchecked_perimeter(outer, geom.r2);
  if (std::abs(p - target) > 1e-8 * target) {
    std::ostringstream os;
    os << "hausdorff_asymmetry: outer perimeter " << p << " differs from the reference " << target;
    throw PreconditionError(os.str());
  }
  const int n = geom.n;
  const double R = geom.r2;
  const double scale = geom.unit_ball_volume() * std::pow(R, n);
  AsymmetrySearch out;
  const ConvexBody body(outer, R);
  if (body.is_round()) {
    out.log.push_back("round outer body: asymmetry 0");
    return out;
  }
  const SupportTable table(body);
  auto objective = [&](const std::vector<double>& v) { return table.distance_to_ball(from_vec(v), R); };

  const Point starts[2] = {body.barycenter(), chebyshev_center(body)};
  const char* names[2] = {"barycenter", "chebyshev"};
  double best = std::numeric_limits<double>::infinity();
  Point best_center = Point::Zero();
  for (int s = 0; s < 2; ++s) {
    const auto r = numerics::nelder_mead(objective, to_vec(starts[s], n), 0.05 * R, 1e-7, 6000);
    std::ostringstream os;
    os << names[s] << " start " << format_point(starts[s], n) << " -> " << r.value / scale << " at "
       << format_point(from_vec(r.x), n);
    out.log.push_back(os.str());
    if (r.value < best) {
      best = r.value;
      best_center = from_vec(r.x);
    }
  }
  // Coarse grid around the incumbent, then a final local search.
  const int half = n == 2 ? 10 : 5;
  const double step = 0.01 * R;
  Point grid_best = best_center;
  double grid_value = best;
  for (int i = -half; i <= half; ++i) {
    for (int j = -half; j <= half; ++j) {
      for (int k = n == 2 ? 0 : -half; k <= (n == 2 ? 0 : half); ++k) {
        const Point c = best_center + step * Point(i, j, k);
        const double v = objective(to_vec(c, n));
        if (v < grid_value) {
          grid_value = v;
          grid_best = c;
        }
      }
    }
  }
  if (grid_value < best) {
    const auto r = numerics::nelder_mead(objective, to_vec(grid_best, n), step, 1e-7, 6000);
    std::ostringstream os;
    os << "grid fallback improved to " << r.value / scale << " at " << format_point(from_vec(r.x), n);
    out.log.push_back(os.str());
    if (r.value < best) {
      best = r.value;
      best_center = from_vec(r.x);
    }
  }
  out.value = best / scale;
  out.best_center = best_center;
  return out;
}

double hausdorff_asymmetry(const BoundaryProfile& outer, const ShellGeometry& geom) {
  return hausdorff_asymmetry_search(outer, geom).value;
}

ConvexPolygon inner_parallel(const BoundaryProfile& outer, const ShellGeometry& geom, double t) {
  if (geom.n != 2) {
    throw PreconditionError("inner_parallel: polygonal sets are planar only");
  }
  return ConvexBody(outer, geom.r2).polygon().inward_offset(t);
}

double inradius(const ConvexBody& body) {
  if (body.is_round()) {
    return body.base_radius() + body.profile().mean();
  }
  return body.boundary_distance(chebyshev_center(body));
}

double inner_parallel_volume(const ConvexBody& body, double t) {
  if (t < 0.0) {
    throw PreconditionError("inner_parallel_volume: negative level");
  }
  const int n = body.dimension();
  auto empty = [t]() {
    return GeometryError("inner parallel set at level " + std::to_string(t) + " is empty");
  };
  if (body.is_round()) {
    const double r = body.base_radius() + body.profile().mean() - t;
    if (!(r > 0.0)) {
      throw empty();
    }
    return n == 2 ? kPi * r * r : 4.0 / 3.0 * kPi * r * r * r;
  }
  if (n == 2) {
    if (t < min_curvature_radius(body.profile(), body.base_radius())) {
      const double area = body.volume() - t * body.perimeter() + kPi * t * t;
      if (!(area > 0.0)) {
        throw empty();
      }
      return area;
    }
    return body.polygon().inward_offset(t).area();
  }
  const Point c = chebyshev_center(body);
  const double depth = body.boundary_distance(c);
  if (t >= depth) {
    throw empty();
  }
  return spatial_parallel_volume(body, c, t);
}

double inner_parallel_volume(const BoundaryProfile& outer, const ShellGeometry& geom, double t) {
  return inner_parallel_volume(ConvexBody(outer, geom.r2), t);
}

double parallel_level_for_volume(const ConvexBody& body, const ShellGeometry& geom, double target_volume) {
  const int n = body.dimension();
  const double full = body.volume();
  if (!(target_volume > 0.0 && target_volume < full)) {
    std::ostringstream os;
    os << "parallel_level_for_volume: target " << target_volume << " outside (0, " << full << ")";
    throw PreconditionError(os.str());
  }
  double t = 0.0;
  double tolerance = 1e-9 * geom.r2;
  if (body.is_round()) {
    const double r = body.base_radius() + body.profile().mean();
    t = n == 2 ? r - std::sqrt(target_volume / kPi) : r - std::cbrt(3.0 * target_volume / (4.0 * kPi));
  } else {
    bool solved = false;
    if (n == 2) {
      const double p = body.perimeter();
      const double disc = p * p - 4.0 * kPi * (full - target_volume);
      if (disc >= 0.0) {
        const double root = (p - std::sqrt(disc)) / (2.0 * kPi);
        if (root < min_curvature_radius(body.profile(), body.base_radius())) {
          t = root;
          solved = true;
        }
      }
    }
    if (!solved && n == 2) {
      tolerance = 1e-6 * geom.r2;
      const double top = inradius(body);
      t = numerics::bisect(
          [&](double s) {
            try {
              return inner_parallel_volume(body, s) - target_volume;
            } catch (const GeometryError&) {
              return -target_volume;
            }
          },
          0.0, top, 1e-14 * top);
    } else if (!solved) {
      tolerance = 1e-6 * geom.r2;
      const Point c = chebyshev_center(body);
      const double depth = body.boundary_distance(c);
      auto residual = [&](double s) {
        return s >= depth ? -target_volume : spatial_parallel_volume(body, c, s) - target_volume;
      };
      std::uintmax_t iterations = 60;
      const auto bracket = boost::math::tools::toms748_solve(residual, 0.0, depth,
                                                             boost::math::tools::eps_tolerance<double>(40), iterations);
      t = 0.5 * (bracket.first + bracket.second);
    }
  }
  const double reference_perimeter = geom.outer_sphere_area();
  const double consistent_hole = full - geom.shell_volume();
  if (std::abs(body.perimeter() - reference_perimeter) <= 1e-8 * reference_perimeter &&
      std::abs(target_volume - consistent_hole) <= 1e-8 * full && t < geom.r2 - geom.r1 - tolerance) {
    std::ostringstream os;
    os << "parallel_level_for_volume: level " << t << " below R2 - R1 = " << geom.r2 - geom.r1
       << " despite matching outer perimeter";
    throw GeometryError(os.str());
  }
  return t;
}

double parallel_level_for_volume(const BoundaryProfile& outer, const ShellGeometry& geom, double target_volume) {
  return parallel_level_for_volume(ConvexBody(outer, geom.r2), geom, target_volume);
}

double distance_to_outer_boundary(const BoundaryProfile& outer, const ShellGeometry& geom, const Point& x) {
  return ConvexBody(outer, geom.r2).boundary_distance(x);
}

LemmaReport lemma_checks(const HoledDomain& domain, double eps) {
  const ShellGeometry& g = domain.geom;
  const int n = g.n;
  if (!(eps > 0.0 && eps < 0.5 * g.r1)) {
    throw PreconditionError("lemma_checks: need 0 < eps < R1/2");
  }
  const BoundaryProfile& u = domain.outer;
  const BoundaryProfile& v = domain.inner;
  if (u.w1inf_norm() > eps * (1.0 + 1e-12) || v.w1inf_norm() > eps * (1.0 + 1e-12)) {
    throw PreconditionError("lemma_checks: profile W^{1,inf} norms exceed eps");
  }
  LemmaReport r;
  r.eps = eps;
  const double area = n * g.unit_ball_volume();
  const double int_u = u.mean() * area;
  const double int_v = v.mean() * area;
  const double u2 = u.l2_norm_sq();
  const double v2 = v.l2_norm_sq();
  const double gu2 = u.gradient_l2_norm_sq();
  const double R1 = g.r1;
  const double R2 = g.r2;

  r.perimeter_expansion = std::pow(R2, n - 2) * int_u + std::pow(R2, n - 3) / (2.0 * (n - 1)) * gu2 +
                          0.5 * (n - 2) * std::pow(R2, n - 3) * u2;
  r.volume_expansion = std::pow(R1, n - 1) * int_v + 0.5 * (n - 1) * std::pow(R1, n - 2) * v2 -
                       std::pow(R2, n - 1) * int_u - 0.5 * (n - 1) * std::pow(R2, n - 2) * u2;
  const double size_u = u2 + gu2;
  const double size_uv = size_u + v2;
  r.perimeter_expansion_ratio = size_u > 0.0 ? std::abs(r.perimeter_expansion) / size_u : 0.0;
  r.volume_expansion_ratio = size_uv > 0.0 ? std::abs(r.volume_expansion) / size_uv : 0.0;

  std::vector<double> high = u.coefficients();
  const std::size_t low_count = n == 2 ? 3 : 4;
  for (std::size_t i = 0; i < std::min(low_count, high.size()); ++i) {
    high[i] = 0.0;
  }
  const BoundaryProfile u_high =
      n == 2 ? BoundaryProfile::fourier(high) : BoundaryProfile::spherical_harmonics(high);
  r.poincare_constant = 2.0 * n;
  const double high_l2 = u_high.l2_norm_sq();
  r.poincare_ratio = high_l2 > 0.0 ? u_high.gradient_l2_norm_sq() / high_l2 : 0.0;
  r.poincare_holds = high_l2 == 0.0 || r.poincare_ratio >= r.poincare_constant * (1.0 - 1e-12);
  r.poincare_deficit = gu2 - 2.0 * n * u2;

  const BoundaryProfile u0 = u.shifted(-u.mean());
  const double sup0 = u0.sup_norm();
  const double grad_sup = u.gradient_sup_norm();
  if (n == 2) {
    r.sup_bound_lhs = sup0;
    r.sup_bound_rhs = kPi * std::sqrt(gu2);
  } else {
    r.sup_bound_lhs = sup0 * sup0;
    r.sup_bound_rhs = gu2 > 0.0 ? 4.0 * gu2 * std::log(8.0 * std::numbers::e * grad_sup * grad_sup / gu2) : 0.0;
  }
  r.sup_bound_holds = r.sup_bound_lhs <= r.sup_bound_rhs * (1.0 + 1e-12) + 1e-300;
  r.gradient_bound_lhs = grad_sup;
  r.gradient_bound_rhs = 3.0 * std::sqrt(u.sup_norm());
  r.gradient_bound_holds = r.gradient_bound_lhs <= r.gradient_bound_rhs * (1.0 + 1e-12) + 1e-300;
  return r;
}

}  // namespace shellstab
