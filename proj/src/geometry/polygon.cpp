#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ksmooth/geometry.hpp"

namespace ksmooth {
namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

// Closed-segment intersection test.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int o1 = sign(orient(a, b, c));
  const int o2 = sign(orient(a, b, d));
  const int o3 = sign(orient(c, d, a));
  const int o4 = sign(orient(c, d, b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = norm2(ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

double signed_area(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) s += cross(v[i], v[(i + 1) % n]);
  return 0.5 * s;
}

[[noreturn]] void invalid(const std::string& what) { fail(ErrorKind::InvalidRegion, what); }

bool polygons_cross(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (segments_intersect(a.edge_start(i), a.edge_end(i), b.edge_start(j), b.edge_end(j)))
        return true;
  return false;
}

}  // namespace

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) invalid("polygon needs at least 3 vertices");
  for (const auto& p : vertices_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) invalid("polygon vertex is not finite");
  for (std::size_t i = 0; i < n; ++i)
    if (vertices_[i] == vertices_[(i + 1) % n]) invalid("polygon has repeated consecutive vertices");

  area_ = signed_area(vertices_);
  if (area_ < 0.0) {
    std::reverse(vertices_.begin(), vertices_.end());
    area_ = -area_;
  }
  if (!(area_ > 0.0)) invalid("polygon has zero area");

  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = edge_start(i), b = edge_end(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 c = edge_start(j), d = edge_end(j);
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share one vertex; they must not fold back onto each other.
        const Point2 shared = (j == i + 1) ? b : a;
        const Point2 other_i = (j == i + 1) ? a : b;
        const Point2 other_j = (j == i + 1) ? d : c;
        if (orient(other_i, shared, other_j) == 0.0 &&
            dot(other_i - shared, other_j - shared) > 0.0)
          invalid("polygon folds back on itself");
        continue;
      }
      if (segments_intersect(a, b, c, d)) {
        std::ostringstream os;
        os << "polygon edges " << i << " and " << j << " intersect";
        invalid(os.str());
      }
    }
  }
}

Point2 Polygon::centroid() const {
  double cx = 0.0, cy = 0.0;
  const Point2 o = vertices_[0];
  for (std::size_t i = 0, n = size(); i < n; ++i) {
    const Point2 p = edge_start(i) - o, q = edge_end(i) - o;
    const double c = cross(p, q);
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  const double s = 1.0 / (6.0 * area_);
  return o + Point2{cx * s, cy * s};
}

double Polygon::diameter() const {
  double d2 = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      d2 = std::max(d2, norm2(vertices_[i] - vertices_[j]));
  return std::sqrt(d2);
}

double Polygon::interior_angle(std::size_t i) const {
  const std::size_t n = size();
  const Point2 v = vertices_[i];
  const Point2 to_next = vertices_[(i + 1) % n] - v;
  const Point2 to_prev = vertices_[(i + n - 1) % n] - v;
  double theta = std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
  if (theta <= 0.0) theta += 2.0 * kPi;
  return theta;
}

bool Polygon::on_boundary(Point2 p) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const Point2 a = edge_start(i), b = edge_end(i);
    if (orient(a, b, p) == 0.0 && on_segment(a, b, p)) return true;
  }
  return false;
}

bool Polygon::contains(Point2 p) const {
  if (on_boundary(p)) return false;
  bool inside = false;
  for (std::size_t i = 0, n = size(); i < n; ++i) {
    const Point2 a = edge_start(i), b = edge_end(i);
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double Polygon::distance_to_boundary(Point2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i)
    d = std::min(d, point_segment_distance(p, edge_start(i), edge_end(i)));
  return d;
}

PolygonalDomain::PolygonalDomain(Polygon outer, std::vector<Polygon> holes)
    : outer_(std::move(outer)), holes_(std::move(holes)) {
  for (std::size_t h = 0; h < holes_.size(); ++h) {
    const Polygon& hole = holes_[h];
    for (const auto& v : hole.vertices())
      if (!outer_.contains(v)) invalid("hole vertex lies outside the outer boundary");
    if (polygons_cross(hole, outer_)) invalid("hole boundary touches the outer boundary");
    for (std::size_t g = 0; g < h; ++g) {
      const Polygon& other = holes_[g];
      if (polygons_cross(hole, other)) invalid("hole boundaries intersect");
      if (other.contains(hole[0]) || hole.contains(other[0])) invalid("holes are nested");
    }
  }
  if (!(area() > 0.0)) invalid("domain has no area");
}

double PolygonalDomain::area() const noexcept {
  double a = outer_.area();
  for (const auto& h : holes_) a -= h.area();
  return a;
}

bool PolygonalDomain::contains(Point2 p) const {
  if (!outer_.contains(p)) return false;
  for (const auto& h : holes_)
    if (h.contains(p) || h.on_boundary(p)) return false;
  return true;
}

double PolygonalDomain::distance_to_boundary(Point2 p) const {
  double d = outer_.distance_to_boundary(p);
  for (const auto& h : holes_) d = std::min(d, h.distance_to_boundary(p));
  return d;
}

double PolygonalDomain::min_boundary_angle() const {
  double m = 2.0 * kPi;
  for (std::size_t i = 0; i < outer_.size(); ++i) m = std::min(m, outer_.interior_angle(i));
  for (const auto& h : holes_)
    for (std::size_t i = 0; i < h.size(); ++i) m = std::min(m, 2.0 * kPi - h.interior_angle(i));
  return m;
}

std::vector<Point2> PolygonalDomain::boundary_vertices() const {
  std::vector<Point2> out = outer_.vertices();
  for (const auto& h : holes_) out.insert(out.end(), h.vertices().begin(), h.vertices().end());
  return out;
}

std::vector<std::array<Point2, 2>> PolygonalDomain::boundary_edges() const {
  std::vector<std::array<Point2, 2>> out;
  auto add = [&](const Polygon& p) {
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back({p.edge_start(i), p.edge_end(i)});
  };
  add(outer_);
  for (const auto& h : holes_) add(h);
  return out;
}

Rect bounding_rectangle(const Polygon& polygon) {
  Rect r{polygon[0], polygon[0]};
  for (const auto& p : polygon.vertices()) {
    r.lo.x = std::min(r.lo.x, p.x);
    r.lo.y = std::min(r.lo.y, p.y);
    r.hi.x = std::max(r.hi.x, p.x);
    r.hi.y = std::max(r.hi.y, p.y);
  }
  return r;
}

Rect bounding_rectangle(const PolygonalDomain& region) { return bounding_rectangle(region.outer()); }

Polygon rectangle_polygon(Point2 lo, Point2 hi) {
  return Polygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

TriangleMetrics triangle_metrics(const Triangle& t) {
  const auto& v = t.v;
  const double area = 0.5 * std::abs(orient(v[0], v[1], v[2]));
  if (!(area > 0.0)) fail(ErrorKind::DegenerateTriangle, "triangle has zero area");
  TriangleMetrics m;
  m.area = area;
  m.min_angle = kPi;
  m.min_edge = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const Point2 a = v[i], b = v[(i + 1) % 3], c = v[(i + 2) % 3];
    const double e = norm(b - a);
    m.diameter = std::max(m.diameter, e);
    m.min_edge = std::min(m.min_edge, e);
    const double angle = std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a));
    m.min_angle = std::min(m.min_angle, angle);
  }
  return m;
}

double Triangulation::total_area() const {
  double s = 0.0;
  for (const auto& t : triangles) s += 0.5 * std::abs(orient(t.v[0], t.v[1], t.v[2]));
  return s;
}

double Triangulation::smallest_angle() const {
  double m = kPi;
  for (const auto& t : triangles) m = std::min(m, triangle_metrics(t).min_angle);
  return m;
}

double Triangulation::largest_area() const {
  double m = 0.0;
  for (const auto& t : triangles) m = std::max(m, 0.5 * std::abs(orient(t.v[0], t.v[1], t.v[2])));
  return m;
}

Triangulation refine_uniform(const Triangulation& t) {
  Triangulation out;
  out.min_angle = t.min_angle;
  out.max_area = t.max_area / 4.0;
  out.triangles.reserve(t.triangles.size() * 4);
  for (const auto& tri : t.triangles) {
    const auto& v = tri.v;
    const Point2 m01 = (v[0] + v[1]) * 0.5, m12 = (v[1] + v[2]) * 0.5, m20 = (v[2] + v[0]) * 0.5;
    out.triangles.push_back({{v[0], m01, m20}});
    out.triangles.push_back({{m01, v[1], m12}});
    out.triangles.push_back({{m20, m12, v[2]}});
    out.triangles.push_back({{m01, m12, m20}});
  }
  return out;
}

std::optional<Polygon> clip_convex(const Polygon& polygon, Point2 p, Point2 n) {
  std::vector<Point2> out;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2 a = polygon.edge_start(i), b = polygon.edge_end(i);
    const double ga = dot(a - p, n), gb = dot(b - p, n);
    if (ga <= 0.0) out.push_back(a);
    if ((ga <= 0.0) != (gb <= 0.0)) {
      const Point2 x = a + (b - a) * (ga / (ga - gb));
      if (out.empty() || !(out.back() == x)) out.push_back(x);
    }
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  if (out.size() < 3) return std::nullopt;
  try {
    return Polygon(std::move(out));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace ksmooth
