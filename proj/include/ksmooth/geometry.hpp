#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ksmooth/common.hpp"

namespace ksmooth {

/// Simple polygon, stored counter-clockwise.
class Polygon {
 public:
  /// Validates and normalizes orientation (clockwise input is reversed).
  /// Throws InvalidRegion for fewer than 3 vertices, repeated consecutive
  /// vertices, self-intersections, or zero area.
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  Point2 operator[](std::size_t i) const { return vertices_[i]; }
  Point2 edge_start(std::size_t i) const { return vertices_[i]; }
  Point2 edge_end(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

  double area() const noexcept { return area_; }
  Point2 centroid() const;
  double diameter() const;

  /// Interior angle at vertex i, radians, in (0, 2π).
  double interior_angle(std::size_t i) const;

  /// Crossing-number test. Points on the boundary return false.
  bool contains(Point2 p) const;
  bool on_boundary(Point2 p) const;
  double distance_to_boundary(Point2 p) const;

 private:
  std::vector<Point2> vertices_;
  double area_ = 0.0;
};

struct Rect {
  Point2 lo;
  Point2 hi;
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double area() const { return width() * height(); }
};

/// Open set Ω: interior of `outer` minus the closed holes.
class PolygonalDomain {
 public:
  explicit PolygonalDomain(Polygon outer, std::vector<Polygon> holes = {});

  const Polygon& outer() const noexcept { return outer_; }
  const std::vector<Polygon>& holes() const noexcept { return holes_; }

  double area() const noexcept;
  bool contains(Point2 p) const;
  double distance_to_boundary(Point2 p) const;

  /// Smallest interior angle of Ω over all boundary vertices (hole angles
  /// measured on the Ω side).
  double min_boundary_angle() const;

  /// Every boundary vertex of outer and holes, in storage order.
  std::vector<Point2> boundary_vertices() const;
  /// Every boundary edge as (start, end).
  std::vector<std::array<Point2, 2>> boundary_edges() const;

 private:
  Polygon outer_;
  std::vector<Polygon> holes_;
};

Rect bounding_rectangle(const PolygonalDomain& region);
Rect bounding_rectangle(const Polygon& polygon);

/// Unit square [0, 1]^2, and an axis-aligned rectangle helper.
Polygon rectangle_polygon(Point2 lo, Point2 hi);

struct Triangle {
  std::array<Point2, 3> v;
  Point2 centroid() const { return (v[0] + v[1] + v[2]) * (1.0 / 3.0); }
};

struct TriangleMetrics {
  double area = 0.0;
  double diameter = 0.0;   // longest edge
  double min_edge = 0.0;
  double min_angle = 0.0;  // radians
};

/// Throws DegenerateTriangle if the area is not positive.
TriangleMetrics triangle_metrics(const Triangle& t);

struct Triangulation {
  std::vector<Triangle> triangles;
  double min_angle = 0.0;  // requested lower bound, radians
  double max_area = 0.0;   // requested upper bound, m^2

  double total_area() const;
  /// Smallest interior angle actually present, radians.
  double smallest_angle() const;
  double largest_area() const;
};

/// Optional position-dependent area bound; the effective bound at a triangle
/// is min(max_area, local(centroid)).
using AreaField = std::function<double(Point2)>;

struct MeshOptions {
  double max_area = 0.0;
  double min_angle = 20.0 * kPi / 180.0;
  std::size_t insertion_cap = 10'000'000;
  AreaField local_max_area;  // empty => uniform max_area
};

struct MeshStats {
  std::size_t vertices = 0;
  std::size_t insertions = 0;
  std::size_t segment_splits = 0;
};

/// Constrained Delaunay triangulation with Ruppert-style refinement.
/// Throws InvalidRegion for bad parameters, NonTerminatingRefinement when the
/// insertion cap is hit.
Triangulation triangulate(const PolygonalDomain& region, const MeshOptions& options,
                          MeshStats* stats = nullptr);
Triangulation triangulate(const PolygonalDomain& region, double max_area,
                          double min_angle = 20.0 * kPi / 180.0);

/// Part of a convex polygon with (x − p)·n ≤ 0; empty when that part has no area.
std::optional<Polygon> clip_convex(const Polygon& polygon, Point2 p, Point2 n);

/// Splits every triangle into four through its edge midpoints.
Triangulation refine_uniform(const Triangulation& t);

}  // namespace ksmooth

namespace ksmooth {

/// {"outer": [[x,y],...], "holes": [[[x,y],...],...]}; throws SchemaError on
/// malformed JSON and InvalidRegion on invalid geometry.
PolygonalDomain domain_from_json(const std::string& text);
std::string domain_to_json(const PolygonalDomain& region);
PolygonalDomain load_domain(const std::string& path);
void save_domain(const std::string& path, const PolygonalDomain& region);

/// Mesh file: {"min_angle":..,"max_area":..,"triangles":[[[x,y],[x,y],[x,y]],...]}.
std::string triangulation_to_json(const Triangulation& t);
Triangulation triangulation_from_json(const std::string& text);

}  // namespace ksmooth
