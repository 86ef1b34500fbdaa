#include <json.hpp>

#include "ksmooth/geometry.hpp"

namespace ksmooth {
namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& what) { fail(ErrorKind::SchemaError, what); }

Point2 point_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    schema(where + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Point2> ring_from(const json& j, const std::string& where) {
  if (!j.is_array()) schema(where + ": expected an array of points");
  if (j.size() < 3) schema(where + ": polygon needs at least 3 vertices");
  std::vector<Point2> pts;
  pts.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    pts.push_back(point_from(j[i], where + "[" + std::to_string(i) + "]"));
  return pts;
}

json ring_to(const Polygon& p) {
  json arr = json::array();
  for (const auto& v : p.vertices()) arr.push_back({v.x, v.y});
  return arr;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

PolygonalDomain domain_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("outer")) schema("domain: missing \"outer\"");
  Polygon outer(ring_from(j["outer"], "outer"));
  std::vector<Polygon> holes;
  if (j.contains("holes")) {
    const json& h = j["holes"];
    if (!h.is_array()) schema("holes: expected an array of polygons");
    for (std::size_t i = 0; i < h.size(); ++i)
      holes.emplace_back(ring_from(h[i], "holes[" + std::to_string(i) + "]"));
  }
  return PolygonalDomain(std::move(outer), std::move(holes));
}

std::string domain_to_json(const PolygonalDomain& region) {
  json j;
  j["outer"] = ring_to(region.outer());
  j["holes"] = json::array();
  for (const auto& h : region.holes()) j["holes"].push_back(ring_to(h));
  return j.dump();
}

PolygonalDomain load_domain(const std::string& path) { return domain_from_json(read_file(path)); }

void save_domain(const std::string& path, const PolygonalDomain& region) {
  write_file_atomic(path, domain_to_json(region) + "\n");
}

std::string triangulation_to_json(const Triangulation& t) {
  json tris = json::array();
  for (const auto& tri : t.triangles)
    tris.push_back({{tri.v[0].x, tri.v[0].y}, {tri.v[1].x, tri.v[1].y}, {tri.v[2].x, tri.v[2].y}});
  json j;
  j["min_angle"] = t.min_angle;
  j["max_area"] = t.max_area;
  j["triangles"] = std::move(tris);
  return j.dump();
}

Triangulation triangulation_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("triangles") || !j["triangles"].is_array())
    schema("mesh: missing \"triangles\"");
  Triangulation t;
  t.min_angle = j.value("min_angle", 0.0);
  t.max_area = j.value("max_area", 0.0);
  for (std::size_t i = 0; i < j["triangles"].size(); ++i) {
    const json& tri = j["triangles"][i];
    const std::string where = "triangles[" + std::to_string(i) + "]";
    if (!tri.is_array() || tri.size() != 3) schema(where + ": expected 3 vertices");
    t.triangles.push_back({{point_from(tri[0], where), point_from(tri[1], where),
                            point_from(tri[2], where)}});
  }
  return t;
}

}  // namespace ksmooth
