#include <algorithm>
#include <cmath>

#include "ksmooth/dem.hpp"
#include "ksmooth/rng.hpp"

namespace ksmooth {
namespace {

// Polygon vertex plus the label of the edge that starts there: the index of
// the neighbouring site whose bisector produced it, or -1 for the box.
struct LabelledVertex {
  Point2 p;
  long label;
};

using Cell = std::vector<LabelledVertex>;

// Keeps {x : (x − m)·d ≤ 0}; new edges along the clip line get `label`.
Cell clip(const Cell& cell, Point2 m, Point2 d, long label) {
  Cell out;
  const std::size_t n = cell.size();
  for (std::size_t k = 0; k < n; ++k) {
    const LabelledVertex& a = cell[k];
    const LabelledVertex& b = cell[(k + 1) % n];
    const double ga = dot(a.p - m, d), gb = dot(b.p - m, d);
    const bool ain = ga <= 0.0, bin = gb <= 0.0;
    if (ain) out.push_back(a);
    if (ain != bin) {
      const double t = ga / (ga - gb);
      const Point2 x = a.p + (b.p - a.p) * t;
      out.push_back({x, ain ? label : a.label});
    }
  }
  return out;
}

Cell merge_close(const Cell& cell, double tol) {
  Cell out;
  for (std::size_t k = 0; k < cell.size(); ++k) {
    const auto& next = cell[(k + 1) % cell.size()];
    if (norm(cell[k].p - next.p) > tol) out.push_back(cell[k]);
  }
  return out;
}

double signed_uniform(const CounterRng& rng, std::uint64_t i) { return 2.0 * rng.uniform_at(i) - 1.0; }

// Multiple of 2^-10 N in about ±1e6 N.
double quantized_force(const CounterRng& rng, std::uint64_t i) {
  const auto k = static_cast<std::int64_t>(rng.bits_at(i) >> 33) - (std::int64_t{1} << 30);
  return std::ldexp(static_cast<double>(k), -10);
}

}  // namespace

Packing parse_packing(const std::string& name) {
  if (name == "dense") return Packing::Dense;
  if (name == "sparse") return Packing::Sparse;
  fail(ErrorKind::InvalidArgument, "unknown packing '" + name + "' (expected dense|sparse)");
}

FloeSnapshot synthesize_floes(const PolygonalDomain& domain, std::size_t count, std::uint64_t seed, Packing packing) {
  if (count < 1) fail(ErrorKind::InvalidArgument, "need at least one floe");
  const double shrink = packing == Packing::Dense ? 0.95 : 0.6;
  const Rect box = bounding_rectangle(domain);
  const double scale = std::max(box.width(), box.height());

  const CounterRng site_rng(seed, 0);
  std::vector<Point2> sites;
  for (std::uint64_t draw = 0; sites.size() < count; draw += 2) {
    if (draw > 2'000'000 + 200 * count) fail(ErrorKind::RejectionStall, "could not place floe sites");
    const Point2 p{box.lo.x + box.width() * site_rng.uniform_at(draw),
                   box.lo.y + box.height() * site_rng.uniform_at(draw + 1)};
    if (domain.contains(p)) sites.push_back(p);
  }

  std::vector<Cell> cells(count);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i) {
    Cell c{{box.lo, -1}, {{box.hi.x, box.lo.y}, -1}, {box.hi, -1}, {{box.lo.x, box.hi.y}, -1}};
    for (std::size_t j = 0; j < count && c.size() >= 3; ++j) {
      if (j == i) continue;
      c = clip(c, (sites[i] + sites[j]) * 0.5, sites[j] - sites[i], static_cast<long>(j));
    }
    cells[i] = merge_close(c, 1e-9 * scale);
  }

  // Keep cells whose shrunken polygon is valid and lies inside the domain.
  std::vector<std::optional<Polygon>> polys(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (cells[i].size() < 3) continue;
    std::vector<Point2> v;
    for (const auto& lv : cells[i]) v.push_back(sites[i] + (lv.p - sites[i]) * shrink);
    try {
      Polygon p(std::move(v));
      bool ok = std::all_of(p.vertices().begin(), p.vertices().end(), [&](Point2 q) { return domain.contains(q); });
      for (const auto& b : domain.boundary_vertices())
        if (ok && p.contains(b)) ok = false;
      if (ok) polys[i] = std::move(p);
    } catch (const Error&) {
    }
  }

  const CounterRng rng(seed, 1);
  FloeSnapshot snap;
  std::vector<long> floe_of(count, -1);
  for (std::size_t i = 0; i < count; ++i) {
    if (!polys[i]) continue;
    const std::uint64_t base = 8 * i;
    Floe f{*polys[i]};
    f.thickness = 0.5 + 2.5 * rng.uniform_at(base);
    f.xi = f.polygon.centroid();
    f.u = {0.5 * signed_uniform(rng, base + 1), 0.5 * signed_uniform(rng, base + 2)};
    f.omega = 1e-5 * signed_uniform(rng, base + 3);
    floe_of[i] = static_cast<long>(snap.floes.size());
    snap.floes.push_back(std::move(f));
  }

  const CounterRng force_rng(seed, 2);
  for (std::size_t i = 0; i < count; ++i) {
    if (floe_of[i] < 0) continue;
    const Cell& c = cells[i];
    for (std::size_t k = 0; k < c.size(); ++k) {
      const long j = c[k].label;
      if (j <= static_cast<long>(i) || floe_of[j] < 0) continue;
      const Cell& other = cells[j];
      const bool shared = std::any_of(other.begin(), other.end(), [&](const LabelledVertex& v) {
        return v.label == static_cast<long>(i);
      });
      if (!shared) continue;
      const Point2 mid = (c[k].p + c[(k + 1) % c.size()].p) * 0.5;
      const std::uint64_t key = 2 * (i * count + static_cast<std::size_t>(j));
      const Point2 force{quantized_force(force_rng, key), quantized_force(force_rng, key + 1)};
      const Point2 zi = sites[i] + (mid - sites[i]) * shrink;
      const Point2 zj = sites[j] + (mid - sites[j]) * shrink;
      snap.floes[floe_of[i]].contacts.push_back({zi, force});
      snap.floes[floe_of[j]].contacts.push_back({zj, force * -1.0});
    }
  }
  return snap;
}

}  // namespace ksmooth
