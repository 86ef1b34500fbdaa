#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "ksmooth/dem.hpp"

namespace ksmooth {
namespace {

using nlohmann::json;

struct LineContext {
  std::size_t line;
  [[noreturn]] void schema(const std::string& field, const std::string& what) const {
    fail(ErrorKind::SchemaError, "line " + std::to_string(line) + ", " + field + ": " + what);
  }
};

const json& member(const json& obj, const char* key, const std::string& field, const LineContext& ctx) {
  if (!obj.is_object()) ctx.schema(field, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) ctx.schema(field + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& field, const LineContext& ctx) {
  if (!j.is_number()) ctx.schema(field, "expected a number");
  return j.get<double>();
}

Point2 point(const json& j, const std::string& field, const LineContext& ctx) {
  if (!j.is_array() || j.size() != 2) ctx.schema(field, "expected [x, y]");
  return {number(j[0], field + "[0]", ctx), number(j[1], field + "[1]", ctx)};
}

Floe parse_floe(const json& j, const std::string& field, const LineContext& ctx) {
  const json& poly = member(j, "poly", field, ctx);
  if (!poly.is_array() || poly.size() < 3) ctx.schema(field + ".poly", "polygon needs at least 3 vertices");
  std::vector<Point2> verts;
  for (std::size_t k = 0; k < poly.size(); ++k)
    verts.push_back(point(poly[k], field + ".poly[" + std::to_string(k) + "]", ctx));

  std::optional<Polygon> polygon;
  try {
    polygon.emplace(std::move(verts));
  } catch (const Error& e) {
    fail(ErrorKind::InvariantViolation, "line " + std::to_string(ctx.line) + ", " + field + ": " + e.what());
  }
  Floe f{*polygon};
  f.thickness = number(member(j, "a", field, ctx), field + ".a", ctx);
  f.xi = point(member(j, "xi", field, ctx), field + ".xi", ctx);
  f.u = point(member(j, "u", field, ctx), field + ".u", ctx);
  f.omega = number(member(j, "omega", field, ctx), field + ".omega", ctx);
  if (j.contains("contacts")) {
    const json& cs = j["contacts"];
    if (!cs.is_array()) ctx.schema(field + ".contacts", "expected an array");
    for (std::size_t c = 0; c < cs.size(); ++c) {
      const std::string cf = field + ".contacts[" + std::to_string(c) + "]";
      f.contacts.push_back({point(member(cs[c], "z", cf, ctx), cf + ".z", ctx),
                            point(member(cs[c], "f", cf, ctx), cf + ".f", ctx)});
    }
  }
  return f;
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

const std::pair<const char*, const char*> kUnits[] = {{"length", "m"}, {"time", "s"}, {"mass", "kg"}, {"force", "N"}};

}  // namespace

std::vector<FloeSnapshot> snapshots_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<FloeSnapshot> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const LineContext ctx{lineno};
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      ctx.schema("line", std::string("malformed JSON: ") + e.what());
    }
    if (!header) {
      const json& units = member(j, "units", "header", ctx);
      for (const auto& [key, want] : kUnits) {
        const json& u = member(units, key, "units", ctx);
        if (!u.is_string() || u.get<std::string>() != want)
          ctx.schema(std::string("units.") + key, std::string("expected \"") + want + "\"");
      }
      header = true;
      continue;
    }
    FloeSnapshot s;
    s.time = number(member(j, "t", "snapshot", ctx), "t", ctx);
    const json& floes = member(j, "floes", "snapshot", ctx);
    if (!floes.is_array()) ctx.schema("floes", "expected an array");
    for (std::size_t i = 0; i < floes.size(); ++i)
      s.floes.push_back(parse_floe(floes[i], "floes[" + std::to_string(i) + "]", ctx));
    try {
      validate_snapshot(s);
    } catch (const Error& e) {
      fail(e.kind(), "line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  if (!header) fail(ErrorKind::SchemaError, "missing units header line");
  std::stable_sort(out.begin(), out.end(), [](const FloeSnapshot& a, const FloeSnapshot& b) { return a.time < b.time; });
  return out;
}

std::string snapshots_to_jsonl(const std::vector<FloeSnapshot>& snapshots) {
  json units = json::object();
  for (const auto& [key, value] : kUnits) units[key] = value;
  std::string out = json{{"units", units}}.dump() + "\n";
  for (const auto& s : snapshots) {
    json floes = json::array();
    for (const auto& f : s.floes) {
      json poly = json::array();
      for (const auto& v : f.polygon.vertices()) poly.push_back(point_json(v));
      json contacts = json::array();
      for (const auto& c : f.contacts) contacts.push_back({{"z", point_json(c.z)}, {"f", point_json(c.f)}});
      floes.push_back({{"poly", poly},
                       {"a", f.thickness},
                       {"xi", point_json(f.xi)},
                       {"u", point_json(f.u)},
                       {"omega", f.omega},
                       {"contacts", contacts}});
    }
    out += json{{"t", s.time}, {"floes", floes}}.dump() + "\n";
  }
  return out;
}

std::vector<FloeSnapshot> load_snapshots(const std::string& path) { return snapshots_from_jsonl(read_file(path)); }

void save_snapshots(const std::string& path, const std::vector<FloeSnapshot>& snapshots) {
  write_file_atomic(path, snapshots_to_jsonl(snapshots));
}

}  // namespace ksmooth
