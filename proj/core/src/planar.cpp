#include "shellstab/planar.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <string>

#include "shellstab/errors.hpp"

namespace shellstab {

namespace {

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Line {
  Point2 point;
  Point2 dir;
  double angle;
};

bool on_left(const Line& l, const Point2& p) { return cross(l.dir, p - l.point) > -1e-14; }

Point2 intersect(const Line& a, const Line& b) {
  const double t = cross(b.dir, a.point - b.point) / cross(a.dir, b.dir);
  return a.point + t * a.dir;
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw GeometryError("ConvexPolygon: need at least three vertices");
  }
  double signed_area = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    signed_area += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  if (signed_area < 0.0) {
    std::reverse(vertices_.begin(), vertices_.end());
  }
  build_edges();
}

void ConvexPolygon::build_edges() {
  const std::size_t count = vertices_.size();
  normals_.resize(count);
  offsets_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Point2 d = vertices_[(i + 1) % count] - vertices_[i];
    const double len = d.norm();
    if (!(len > 0.0)) {
      throw GeometryError("ConvexPolygon: repeated vertex");
    }
    normals_[i] = Point2(d.y(), -d.x()) / len;
    offsets_[i] = normals_[i].dot(vertices_[i]);
  }
  coarse_.clear();
  const int stride = std::max<int>(1, static_cast<int>(std::sqrt(static_cast<double>(count))) / 2);
  for (std::size_t i = 0; i < count; i += stride) {
    coarse_.push_back(static_cast<int>(i));
  }
}

ConvexPolygon ConvexPolygon::from_profile(const BoundaryProfile& profile, double base_radius, int vertices,
                                          const Point2& center) {
  std::vector<Point2> pts(vertices);
  for (int j = 0; j < vertices; ++j) {
    const double t = 2.0 * std::numbers::pi * j / vertices;
    const double r = base_radius + profile.value_planar(t);
    if (!(r > 0.0)) {
      throw GeometryError("ConvexPolygon::from_profile: non-positive radius at angle " + std::to_string(t));
    }
    pts[j] = center + r * Point2(std::cos(t), std::sin(t));
  }
  return ConvexPolygon(std::move(pts));
}

ConvexPolygon ConvexPolygon::square(double side, const Point2& center) {
  const double h = 0.5 * side;
  return ConvexPolygon({center + Point2(-h, -h), center + Point2(h, -h), center + Point2(h, h), center + Point2(-h, h)});
}

double ConvexPolygon::area() const {
  double total = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    total += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  return 0.5 * total;
}

double ConvexPolygon::perimeter() const {
  double total = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    total += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
  }
  return total;
}

Point2 ConvexPolygon::centroid() const {
  Point2 c = Point2::Zero();
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point2& p = vertices_[i];
    const Point2& q = vertices_[(i + 1) % vertices_.size()];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

bool ConvexPolygon::contains(const Point2& x) const {
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    if (normals_[i].dot(x) > offsets_[i]) {
      return false;
    }
  }
  return true;
}

double ConvexPolygon::boundary_distance(const Point2& x) const {
  const double gap = boundary_gap(x);
  if (gap < -1e-12) {
    throw PreconditionError("boundary_distance: point lies outside the polygon");
  }
  return std::max(gap, 0.0);
}

double ConvexPolygon::boundary_gap(const Point2& x) const { return nearest_edge(x).second; }

std::pair<std::size_t, double> ConvexPolygon::nearest_edge(const Point2& x) const {
  const std::size_t count = normals_.size();
  auto gap = [&](std::size_t i) { return offsets_[i] - normals_[i].dot(x); };
  std::size_t best_index = 0;
  double best = gap(0);
  auto consider = [&](std::size_t i) {
    const double g = gap(i);
    if (g < best) {
      best = g;
      best_index = i;
    }
  };
  if (count <= 64) {
    for (std::size_t i = 1; i < count; ++i) {
      consider(i);
    }
    return {best_index, best};
  }
  // Coarse scan over sampled edges, then an exhaustive search in the window
  // around every coarse local minimum.
  const std::size_t m = coarse_.size();
  std::vector<double> coarse_gap(m);
  for (std::size_t j = 0; j < m; ++j) {
    coarse_gap[j] = gap(coarse_[j]);
  }
  const int stride = m > 1 ? coarse_[1] - coarse_[0] : 1;
  for (std::size_t j = 0; j < m; ++j) {
    const double prev = coarse_gap[(j + m - 1) % m];
    const double next = coarse_gap[(j + 1) % m];
    if (coarse_gap[j] > prev || coarse_gap[j] > next) {
      continue;
    }
    for (int off = -2 * stride; off <= 2 * stride; ++off) {
      consider((coarse_[j] + off + 4 * count) % count);
    }
  }
  return {best_index, best};
}

double ConvexPolygon::support(const Point2& direction) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const Point2& v : vertices_) {
    best = std::max(best, v.dot(direction));
  }
  return best;
}

ConvexPolygon ConvexPolygon::inward_offset(double t) const {
  if (t < 0.0) {
    throw PreconditionError("inward_offset: negative offset");
  }
  if (t == 0.0) {
    return *this;
  }
  const std::size_t count = vertices_.size();
  std::vector<Line> lines(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Point2 d = vertices_[(i + 1) % count] - vertices_[i];
    lines[i] = Line{vertices_[i] - t * normals_[i], d, std::atan2(d.y(), d.x())};
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.angle < b.angle; });

  std::deque<Line> dq;
  for (const Line& l : lines) {
    if (!dq.empty() && std::abs(cross(dq.back().dir, l.dir)) < 1e-18 * l.dir.squaredNorm() &&
        dq.back().dir.dot(l.dir) > 0.0) {
      if (on_left(dq.back(), l.point)) {
        dq.pop_back();
      } else {
        continue;
      }
    }
    while (dq.size() >= 2 && !on_left(l, intersect(dq[dq.size() - 1], dq[dq.size() - 2]))) {
      dq.pop_back();
    }
    while (dq.size() >= 2 && !on_left(l, intersect(dq[0], dq[1]))) {
      dq.pop_front();
    }
    dq.push_back(l);
  }
  while (dq.size() >= 3 && !on_left(dq.front(), intersect(dq[dq.size() - 1], dq[dq.size() - 2]))) {
    dq.pop_back();
  }
  while (dq.size() >= 3 && !on_left(dq.back(), intersect(dq[0], dq[1]))) {
    dq.pop_front();
  }
  if (dq.size() < 3) {
    throw GeometryError("inward_offset: offset " + std::to_string(t) + " empties the polygon");
  }
  std::vector<Point2> pts;
  pts.reserve(dq.size());
  for (std::size_t i = 0; i < dq.size(); ++i) {
    const Point2 p = intersect(dq[i], dq[(i + 1) % dq.size()]);
    if (pts.empty() || (p - pts.back()).norm() > 1e-13) {
      pts.push_back(p);
    }
  }
  if (pts.size() >= 2 && (pts.front() - pts.back()).norm() <= 1e-13) {
    pts.pop_back();
  }
  if (pts.size() < 3) {
    throw GeometryError("inward_offset: offset " + std::to_string(t) + " empties the polygon");
  }
  ConvexPolygon out(std::move(pts));
  if (!(out.area() > 1e-14)) {
    throw GeometryError("inward_offset: offset " + std::to_string(t) + " empties the polygon");
  }
  // Every vertex of the offset set must keep distance t from each edge.
  for (const Point2& v : out.vertices_) {
    for (std::size_t i = 0; i < count; i += std::max<std::size_t>(1, count / 64)) {
      if (offsets_[i] - normals_[i].dot(v) < t - 1e-9) {
        throw GeometryError("inward_offset: offset " + std::to_string(t) + " empties the polygon");
      }
    }
  }
  return out;
}

double ConvexPolygon::inradius() const {
  double lo = 0.0;
  double hi = 0.0;
  const Point2 c = centroid();
  hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    hi = std::min(hi, offsets_[i] - normals_[i].dot(c));
  }
  lo = hi;
  double span = 0.0;
  for (const Point2& v : vertices_) {
    span = std::max(span, (v - c).norm());
  }
  hi = span;
  for (int it = 0; it < 80 && hi - lo > 1e-13 * span; ++it) {
    const double mid = 0.5 * (lo + hi);
    try {
      (void)inward_offset(mid);
      lo = mid;
    } catch (const GeometryError&) {
      hi = mid;
    }
  }
  return lo;
}

bool is_convex_planar(const BoundaryProfile& profile, double base_radius, double tolerance) {
  const int samples = std::max(4096, 64 * (profile.degree() + 1));
  for (int j = 0; j < samples; ++j) {
    const auto jet = profile.planar_jet(2.0 * std::numbers::pi * j / samples);
    const double r = base_radius + jet.value;
    if (r * r + 2.0 * jet.d1 * jet.d1 - r * jet.d2 <= tolerance) {
      return false;
    }
  }
  return true;
}

}  // namespace shellstab
