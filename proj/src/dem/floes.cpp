#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "ksmooth/dem.hpp"
#include "ksmooth/rng.hpp"

namespace ksmooth {
namespace {

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::string where(std::size_t i) { return "floe " + std::to_string(i) + ": "; }

}  // namespace

std::vector<std::string> validate_snapshot(const FloeSnapshot& s, const PolygonalDomain* domain) {
  if (!std::isfinite(s.time)) fail(ErrorKind::InvariantViolation, "snapshot time is not finite");
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < s.floes.size(); ++i) {
    const Floe& f = s.floes[i];
    if (!(f.thickness > 0.0) || !std::isfinite(f.thickness))
      fail(ErrorKind::InvariantViolation, where(i) + "thickness must be positive");
    if (!finite(f.xi) || !finite(f.u) || !std::isfinite(f.omega))
      fail(ErrorKind::InvariantViolation, where(i) + "kinematics are not finite");
    const double diam = f.polygon.diameter();
    if (norm(f.xi - f.polygon.centroid()) > 0.01 * diam)
      warnings.push_back(where(i) + "centre of mass is more than 1% of the diameter from the centroid");
    for (std::size_t c = 0; c < f.contacts.size(); ++c) {
      const Contact& k = f.contacts[c];
      if (!finite(k.z) || !finite(k.f))
        fail(ErrorKind::InvariantViolation, where(i) + "contact " + std::to_string(c) + " is not finite");
      if (f.polygon.distance_to_boundary(k.z) > 0.1 * diam)
        warnings.push_back(where(i) + "contact " + std::to_string(c) + " lies far from the boundary");
    }
    if (domain) {
      for (const auto& v : f.polygon.vertices())
        if (!domain->contains(v) && domain->distance_to_boundary(v) > 1e-9 * diam) {
          warnings.push_back(where(i) + "vertex outside the domain");
          break;
        }
    }
  }
  return warnings;
}

Point2 floe_velocity(const Floe& floe, Point2 y) {
  const Point2 r = y - floe.xi;
  return {floe.u.x - floe.omega * r.y, floe.u.y + floe.omega * r.x};
}

std::array<double, 3> floe_stress(const Floe& floe, bool per_area) {
  std::array<double, 3> s{0.0, 0.0, 0.0};
  for (const auto& c : floe.contacts) {
    const Point2 r = c.z - floe.xi;
    s[0] += 2.0 * r.x * c.f.x;
    s[1] += r.x * c.f.y + c.f.x * r.y;
    s[2] += 2.0 * r.y * c.f.y;
  }
  if (per_area)
    for (auto& v : s) v /= floe.polygon.area();
  return s;
}

FloeRules build_floe_rules(const FloeSnapshot& s, const RuleOptions& opt) {
  const std::size_t n = s.floes.size();
  FloeRules out;
  out.rules.resize(n);
  const bool tri = opt.backend == RuleBackend::Triangulation;
  if (tri) out.meshes.resize(n);
  std::vector<std::string> errors(n);
  std::vector<ErrorKind> kinds(n, ErrorKind::InvalidArgument);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      RuleOptions o = opt;
      o.seed = CounterRng::mix(opt.seed ^ CounterRng::mix(i));
      const PolygonalDomain floe(s.floes[i].polygon);
      // sharp floe corners cap the angle bound
      if (tri) o.min_angle = std::min(o.min_angle, 0.9 * floe.min_boundary_angle());
      out.rules[i] = build_rule(floe, o, tri ? &out.meshes[i] : nullptr);
    } catch (const Error& e) {
      errors[i] = e.what();
      kinds[i] = e.kind();
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) fail(kinds[i], where(i) + errors[i]);
  return out;
}

PiecewiseField mass_density_field(const FloeSnapshot& s, const FloeRules& rules, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) fail(ErrorKind::InvalidArgument, "ice density must be positive");
  std::vector<FieldPiece> pieces;
  pieces.reserve(s.floes.size());
  for (std::size_t i = 0; i < s.floes.size(); ++i) {
    const double mu = rho * s.floes[i].thickness;
    pieces.push_back(constant_piece(s.floes[i].polygon, rules.rules[i], std::span<const double>(&mu, 1)));
  }
  return PiecewiseField(1, std::move(pieces));
}

PiecewiseField velocity_field(const FloeSnapshot& s, const FloeRules& rules) {
  std::vector<FieldPiece> pieces;
  pieces.reserve(s.floes.size());
  for (std::size_t i = 0; i < s.floes.size(); ++i) {
    const Floe& f = s.floes[i];
    pieces.push_back(sample_piece(f.polygon, rules.rules[i], 2, [&f](Point2 y, double* out) {
      const Point2 v = floe_velocity(f, y);
      out[0] = v.x;
      out[1] = v.y;
    }));
  }
  return PiecewiseField(2, std::move(pieces));
}

PiecewiseField stress_field(const FloeSnapshot& s, const FloeRules& rules, bool per_area) {
  std::vector<FieldPiece> pieces;
  pieces.reserve(s.floes.size());
  for (std::size_t i = 0; i < s.floes.size(); ++i) {
    const auto sigma = floe_stress(s.floes[i], per_area);
    pieces.push_back(constant_piece(s.floes[i].polygon, rules.rules[i], sigma));
  }
  return PiecewiseField(3, std::move(pieces));
}

namespace {

constexpr char kFieldMagic[8] = {'K', 'S', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(const std::string& s, std::size_t& pos) {
  if (pos + sizeof(T) > s.size()) fail(ErrorKind::SchemaError, "field bundle is truncated");
  T v;
  std::memcpy(&v, s.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string field_to_bytes(const PiecewiseField& f) {
  std::string out(kFieldMagic, sizeof kFieldMagic);
  put<std::uint64_t>(out, f.dim());
  put<std::uint64_t>(out, f.pieces().size());
  for (const auto& p : f.pieces()) {
    put<std::uint64_t>(out, p.polygon.size());
    for (const auto& v : p.polygon.vertices()) {
      put(out, v.x);
      put(out, v.y);
    }
    put<std::uint64_t>(out, p.rule.size());
    for (std::size_t j = 0; j < p.rule.size(); ++j) {
      put(out, p.rule.nodes[j].x);
      put(out, p.rule.nodes[j].y);
      put(out, p.rule.weights[j]);
      for (std::size_t c = 0; c < f.dim(); ++c) put(out, p.values[j * f.dim() + c]);
    }
  }
  return out;
}

PiecewiseField field_from_bytes(const std::string& bytes) {
  if (bytes.size() < sizeof kFieldMagic || std::memcmp(bytes.data(), kFieldMagic, sizeof kFieldMagic) != 0)
    fail(ErrorKind::SchemaError, "not a field bundle");
  std::size_t pos = sizeof kFieldMagic;
  const auto dim = take<std::uint64_t>(bytes, pos);
  const auto count = take<std::uint64_t>(bytes, pos);
  if (dim == 0 || dim > 16) fail(ErrorKind::SchemaError, "field bundle has an invalid dimension");
  std::vector<FieldPiece> pieces;
  for (std::uint64_t l = 0; l < count; ++l) {
    const auto nv = take<std::uint64_t>(bytes, pos);
    if (nv > bytes.size()) fail(ErrorKind::SchemaError, "field bundle is corrupt");
    std::vector<Point2> verts(nv);
    for (auto& v : verts) {
      v.x = take<double>(bytes, pos);
      v.y = take<double>(bytes, pos);
    }
    const auto nn = take<std::uint64_t>(bytes, pos);
    if (nn > bytes.size()) fail(ErrorKind::SchemaError, "field bundle is corrupt");
    QuadratureRule rule;
    std::vector<double> values;
    values.reserve(nn * dim);
    for (std::uint64_t j = 0; j < nn; ++j) {
      const double x = take<double>(bytes, pos), y = take<double>(bytes, pos);
      rule.nodes.push_back({x, y});
      rule.weights.push_back(take<double>(bytes, pos));
      for (std::uint64_t c = 0; c < dim; ++c) values.push_back(take<double>(bytes, pos));
    }
    rule.region_area = rule.weight_sum();
    pieces.push_back({Polygon(std::move(verts)), std::move(rule), std::move(values)});
  }
  if (pos != bytes.size()) fail(ErrorKind::SchemaError, "trailing bytes in field bundle");
  return PiecewiseField(dim, std::move(pieces));
}

}  // namespace ksmooth
