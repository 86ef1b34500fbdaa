#include <doctest.h>

#include <cmath>

#include "ksmooth/geometry.hpp"
#include "support.hpp"

using namespace ksmooth;
using test::kind_of;

namespace {

Polygon unit_square() { return rectangle_polygon({0, 0}, {1, 1}); }

}  // namespace

TEST_CASE("polygon basics") {
  const Polygon sq = unit_square();
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.centroid().x == doctest::Approx(0.5));
  CHECK(sq.diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq.contains({0.5, 0.5}));
  CHECK_FALSE(sq.contains({1.5, 0.5}));
  CHECK_FALSE(sq.contains({0.0, 0.5}));
  CHECK(sq.on_boundary({0.0, 0.5}));
  CHECK(sq.distance_to_boundary({0.25, 0.5}) == doctest::Approx(0.25));
  for (std::size_t i = 0; i < 4; ++i) CHECK(sq.interior_angle(i) == doctest::Approx(kPi / 2));
}

TEST_CASE("clockwise input is reoriented") {
  const Polygon p({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(p.area() == doctest::Approx(1.0));
  CHECK(orient(p[0], p[1], p[2]) > 0);
}

TEST_CASE("invalid polygons are rejected") {
  CHECK(kind_of([] { Polygon({{0, 0}, {1, 0}}); }) == ErrorKind::InvalidRegion);
  CHECK(kind_of([] { Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}); }) == ErrorKind::InvalidRegion);
  CHECK(kind_of([] { Polygon({{0, 0}, {1, 0}, {2, 0}}); }) == ErrorKind::InvalidRegion);
}

TEST_CASE("domain with a hole") {
  const PolygonalDomain d(rectangle_polygon({0, 0}, {4, 4}), {rectangle_polygon({1, 1}, {2, 2})});
  CHECK(d.area() == doctest::Approx(15.0));
  CHECK(d.contains({0.5, 0.5}));
  CHECK_FALSE(d.contains({1.5, 1.5}));
  CHECK(d.distance_to_boundary({1.5, 0.5}) == doctest::Approx(0.5));
  CHECK(d.min_boundary_angle() == doctest::Approx(kPi / 2));
  CHECK(d.boundary_vertices().size() == 8);
}

TEST_CASE("triangulation respects area and angle bounds and covers the domain") {
  const PolygonalDomain d(unit_square());
  MeshStats st;
  const Triangulation t = triangulate(d, MeshOptions{.max_area = 0.01}, &st);
  CHECK(t.triangles.size() >= 100);
  CHECK(t.largest_area() <= 0.01 * (1 + 1e-12));
  CHECK(t.smallest_angle() >= 20.0 * kPi / 180.0 - 1e-9);
  CHECK(t.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& tri : t.triangles) CHECK(d.contains(tri.centroid()));
}

TEST_CASE("triangulation of an L-shape with a hole") {
  const Polygon L({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  const PolygonalDomain d(L, {rectangle_polygon({0.25, 0.25}, {0.75, 0.75})});
  const Triangulation t = triangulate(d, 0.02);
  CHECK(t.total_area() == doctest::Approx(d.area()).epsilon(1e-10));
  CHECK(t.smallest_angle() >= 20.0 * kPi / 180.0 - 1e-9);
  for (const auto& tri : t.triangles) CHECK(d.contains(tri.centroid()));
}

TEST_CASE("triangulation is deterministic") {
  const PolygonalDomain d(Polygon({{0, 0}, {3, 0}, {2, 1.5}, {0.5, 2}}));
  CHECK(triangulation_to_json(triangulate(d, 0.05)) == triangulation_to_json(triangulate(d, 0.05)));
}

TEST_CASE("triangulation area lower bound") {
  // N ≥ |Ω| / max_area
  const PolygonalDomain d(rectangle_polygon({0, 0}, {140e3, 140e3}));
  const Triangulation t = triangulate(d, 0.5e6 * 16);
  CHECK(t.triangles.size() >= std::size_t(140.0 * 140.0 / 8.0));
}

TEST_CASE("bad mesh parameters") {
  const PolygonalDomain d(unit_square());
  CHECK(kind_of([&] { triangulate(d, 0.0); }) == ErrorKind::InvalidRegion);
  CHECK(kind_of([&] { triangulate(d, 0.1, 65.0 * kPi / 180.0); }) == ErrorKind::InvalidRegion);
  CHECK(kind_of([&] { triangulate(d, MeshOptions{.max_area = 1e-6, .insertion_cap = 100}); }) ==
        ErrorKind::NonTerminatingRefinement);
}

TEST_CASE("uniform refinement quarters areas") {
  const Triangulation t = triangulate(PolygonalDomain(unit_square()), 0.1);
  const Triangulation r = refine_uniform(t);
  CHECK(r.triangles.size() == 4 * t.triangles.size());
  CHECK(r.total_area() == doctest::Approx(1.0));
  CHECK(r.largest_area() <= t.largest_area() / 4 * (1 + 1e-12));
}

TEST_CASE("clip_convex splits a square") {
  const auto left = clip_convex(unit_square(), {0.5, 0}, {1, 0});
  REQUIRE(left);
  CHECK(left->area() == doctest::Approx(0.5));
  CHECK(bounding_rectangle(*left).hi.x == doctest::Approx(0.5));
  CHECK_FALSE(clip_convex(unit_square(), {-1, 0}, {1, 0}));
}

TEST_CASE("domain JSON round trip and schema errors") {
  const PolygonalDomain d(rectangle_polygon({0, 0}, {4, 4}), {rectangle_polygon({1, 1}, {2, 2})});
  const PolygonalDomain back = domain_from_json(domain_to_json(d));
  CHECK(back.area() == doctest::Approx(d.area()));
  CHECK(back.holes().size() == 1);
  CHECK(kind_of([] { domain_from_json("{\"outer\": 3}"); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { domain_from_json("not json"); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { domain_from_json("{\"outer\": [[0,0],[1,1],[1,0],[0,1]]}"); }) == ErrorKind::InvalidRegion);
}

TEST_CASE("mesh JSON round trip") {
  const Triangulation t = triangulate(PolygonalDomain(unit_square()), 0.1);
  const Triangulation back = triangulation_from_json(triangulation_to_json(t));
  REQUIRE(back.triangles.size() == t.triangles.size());
  CHECK(back.triangles[3].v[1] == t.triangles[3].v[1]);
}
