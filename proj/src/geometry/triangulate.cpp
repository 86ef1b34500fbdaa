// Constrained Delaunay triangulation and quality refinement.
//
// Phase 1 builds an unconstrained Delaunay triangulation of the boundary
// vertices inside a super-triangle (Bowyer-Watson), then recovers every
// boundary segment by splitting it until it appears as an edge. Recovered
// segments become constrained edges; cavities never cross them. Triangles
// outside Ω are then discarded.
//
// Phase 2 is Ruppert refinement: encroached subsegments are split (midpoint,
// or concentric-shell points next to input vertices), and triangles that are
// too large or too skinny receive their circumcenter unless it would encroach
// a subsegment, in which case the subsegment is split instead.
//
// Predicates are plain double arithmetic on coordinates shifted to the
// bounding-box center; no exact arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_set>

#include "ksmooth/geometry.hpp"

namespace ksmooth {
namespace {

constexpr int kNone = -1;

double incircle(Point2 a, Point2 b, Point2 c, Point2 p) {
  const double adx = a.x - p.x, ady = a.y - p.y;
  const double bdx = b.x - p.x, bdy = b.y - p.y;
  const double cdx = c.x - p.x, cdy = c.y - p.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return ad * (bdx * cdy - cdx * bdy) + bd * (cdx * ady - adx * cdy) + cd * (adx * bdy - bdx * ady);
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  const Point2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = norm2(ab), ac2 = norm2(ac);
  return a + Point2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (std::uint64_t{hi} << 32) | lo;
}

class Mesher {
 public:
  Mesher(const PolygonalDomain& region, const MeshOptions& options)
      : region_(region), options_(options) {
    const Rect box = bounding_rectangle(region);
    center_ = (box.lo + box.hi) * 0.5;
    scale_ = std::max(box.width(), box.height());
    sin_min_angle_sq_ = std::sin(options.min_angle) * std::sin(options.min_angle);
  }

  Triangulation run(MeshStats* stats) {
    build_boundary_delaunay();
    carve_exterior();
    refine();

    Triangulation out;
    out.min_angle = options_.min_angle;
    out.max_area = options_.max_area;
    for (const Tri& t : tris_) {
      if (!t.alive) continue;
      out.triangles.push_back(
          {{pts_[t.v[0]] + center_, pts_[t.v[1]] + center_, pts_[t.v[2]] + center_}});
    }
    if (stats) {
      stats->vertices = pts_.size() - 3;
      stats->insertions = insertions_;
      stats->segment_splits = segment_splits_;
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v{};  // counter-clockwise
    std::array<int, 3> n{};  // n[i] is across the edge opposite v[i]
    std::array<bool, 3> c{};  // constrained edge opposite v[i]
    bool alive = false;
  };

  struct BoundaryEdge {
    int a, b, outside;
    bool constrained;
  };

  struct Cavity {
    std::vector<int> tris;
    std::vector<BoundaryEdge> edges;
    int block_tri = kNone;
    int block_edge = kNone;
  };

  struct QueuedTri {
    int id;
    std::array<int, 3> v;
  };

  // ---- basic storage -------------------------------------------------------

  int add_point(Point2 p, bool input) {
    pts_.push_back(p);
    is_input_.push_back(input ? 1 : 0);
    vtri_.push_back(kNone);
    return static_cast<int>(pts_.size()) - 1;
  }

  int new_tri() {
    int id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
    } else {
      id = static_cast<int>(tris_.size());
      tris_.emplace_back();
      mark_.push_back(0);
    }
    tris_[id] = Tri{};
    tris_[id].alive = true;
    return id;
  }

  void kill_tri(int id) {
    tris_[id].alive = false;
    free_.push_back(id);
  }

  Point2 P(int v) const { return pts_[v]; }

  static int index_of(const Tri& t, int v) {
    for (int i = 0; i < 3; ++i)
      if (t.v[i] == v) return i;
    return kNone;
  }

  // Index i such that t's edge opposite v[i] is (a, b) in that orientation.
  static int edge_index(const Tri& t, int a, int b) {
    for (int i = 0; i < 3; ++i)
      if (t.v[(i + 1) % 3] == a && t.v[(i + 2) % 3] == b) return i;
    return kNone;
  }

  // Triangle containing directed edge (a, b), or kNone.
  int find_directed_edge(int a, int b) const {
    const int start = vtri_[a];
    if (start == kNone) return kNone;
    // Rotate one way, then the other (boundary vertices have open fans).
    for (int dir = 0; dir < 2; ++dir) {
      int t = start;
      for (int guard = 0; guard < 4096 && t != kNone; ++guard) {
        const Tri& tri = tris_[t];
        const int i = index_of(tri, a);
        if (tri.v[(i + 1) % 3] == b) return t;
        t = dir == 0 ? tri.n[(i + 2) % 3] : tri.n[(i + 1) % 3];
        if (t == start) break;
      }
    }
    return kNone;
  }

  // ---- predicates ----------------------------------------------------------

  double tri_area(const Tri& t) const { return 0.5 * orient(P(t.v[0]), P(t.v[1]), P(t.v[2])); }

  double area_limit(Point2 centroid) const {
    double limit = options_.max_area;
    if (options_.local_max_area) limit = std::min(limit, options_.local_max_area(centroid + center_));
    return limit;
  }

  bool is_bad(int id) const {
    const Tri& t = tris_[id];
    const Point2 a = P(t.v[0]), b = P(t.v[1]), c = P(t.v[2]);
    const double area = 0.5 * orient(a, b, c);
    if (area > area_limit((a + b + c) * (1.0 / 3.0))) return true;
    // Smallest angle sits between the two longest edges: sin = 2A / (l_mid l_max).
    double l[3] = {norm2(b - a), norm2(c - b), norm2(a - c)};
    std::sort(l, l + 3);
    return 4.0 * area * area < sin_min_angle_sq_ * l[1] * l[2];
  }

  // ---- Bowyer-Watson -------------------------------------------------------

  // Visibility walk; only used while the super-triangle still covers everything.
  int locate(Point2 p, int hint) const {
    int t = hint;
    for (std::size_t k = 0; t == kNone || !tris_[t].alive; ++k) t = static_cast<int>(k % tris_.size());
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tri = tris_[t];
      int next = kNone;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + static_cast<int>(steps)) % 3;
        if (orient(P(tri.v[(i + 1) % 3]), P(tri.v[(i + 2) % 3]), p) < 0.0) {
          next = tri.n[i];
          break;
        }
      }
      if (next == kNone) return t;
      t = next;
    }
    fail(ErrorKind::InvalidRegion, "point location failed during triangulation");
  }

  // Grows the Bowyer-Watson cavity of p from the seeds. Returns false if a
  // constrained edge separates p from the cavity (block_* identifies it).
  bool build_cavity(Point2 p, std::initializer_list<int> seeds, Cavity& cav, int skip_a = kNone,
                    int skip_b = kNone) {
    auto skipped = [&](int a, int b) {
      return skip_a != kNone && ((a == skip_a && b == skip_b) || (a == skip_b && b == skip_a));
    };
    cav.tris.clear();
    cav.edges.clear();
    cav.block_tri = cav.block_edge = kNone;
    ++stamp_;
    std::vector<int>& stack = scratch_;
    stack.clear();
    for (int s : seeds) {
      if (s == kNone) continue;
      mark_[s] = stamp_;
      cav.tris.push_back(s);
      stack.push_back(s);
    }
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      const Tri& tri = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tri.n[i];
        if (nb != kNone && mark_[nb] == stamp_) continue;
        if (skipped(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3])) continue;
        const Point2 a = P(tri.v[(i + 1) % 3]), b = P(tri.v[(i + 2) % 3]);
        const bool wrong_side = orient(a, b, p) <= 0.0;
        if (nb == kNone || tri.c[i]) {
          if (wrong_side) {
            cav.block_tri = t;
            cav.block_edge = i;
            return false;
          }
          continue;
        }
        const Tri& o = tris_[nb];
        if (wrong_side || incircle(P(o.v[0]), P(o.v[1]), P(o.v[2]), p) > 0.0) {
          mark_[nb] = stamp_;
          cav.tris.push_back(nb);
          stack.push_back(nb);
        }
      }
    }
    for (int t : cav.tris) {
      const Tri& tri = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tri.n[i];
        if (nb != kNone && mark_[nb] == stamp_) continue;
        if (skipped(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3])) continue;
        cav.edges.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], nb, tri.c[i]});
      }
    }
    return true;
  }

  // Replaces the cavity with a fan around vertex pid. If (split_a, split_b)
  // is a constrained edge being split, its halves are constrained.
  void commit(int pid, const Cavity& cav, int split_a = kNone, int split_b = kNone) {
    for (int t : cav.tris) kill_tri(t);
    created_.clear();
    for (const BoundaryEdge& e : cav.edges) {
      const int id = new_tri();
      Tri& t = tris_[id];
      t.v = {pid, e.a, e.b};
      t.n = {e.outside, kNone, kNone};
      t.c = {e.constrained, false, false};
      if (split_a != kNone) {
        t.c[1] = (e.b == split_a || e.b == split_b);
        t.c[2] = (e.a == split_a || e.a == split_b);
      }
      if (e.outside != kNone) {
        Tri& o = tris_[e.outside];
        o.n[edge_index(o, e.b, e.a)] = id;
      }
      created_.push_back(id);
    }
    // Stitch fan neighbours: edge (b, pid) of one fan triangle is (pid, a) of the next.
    for (int id : created_) {
      Tri& t = tris_[id];
      for (int other : created_) {
        if (other == id) continue;
        const Tri& o = tris_[other];
        if (o.v[1] == t.v[2]) t.n[1] = other;
        if (o.v[2] == t.v[1]) t.n[2] = other;
      }
      for (int v : t.v) vtri_[v] = id;
    }
    ++insertions_;
    if (insertions_ > options_.insertion_cap)
      fail(ErrorKind::NonTerminatingRefinement, "refinement hit the insertion cap");
  }

  // ---- phase 1 -------------------------------------------------------------

  void build_boundary_delaunay() {
    const double m = 20.0 * scale_;
    const int s0 = add_point({-m, -m}, false);
    const int s1 = add_point({m, -m}, false);
    const int s2 = add_point({0.0, m}, false);
    const int root = new_tri();
    tris_[root].v = {s0, s1, s2};
    tris_[root].n = {kNone, kNone, kNone};
    for (int v : tris_[root].v) vtri_[v] = root;

    auto add_loop = [&](const Polygon& poly) {
      std::vector<int> ids;
      for (const auto& q : poly.vertices()) ids.push_back(add_point(q - center_, true));
      for (std::size_t i = 0; i < ids.size(); ++i) segments_.push_back({ids[i], ids[(i + 1) % ids.size()]});
    };
    add_loop(region_.outer());
    for (const auto& h : region_.holes()) add_loop(h);

    int hint = root;
    Cavity cav;
    for (int v = 3; v < static_cast<int>(pts_.size()); ++v) {
      const int t = locate(P(v), hint);
      if (!build_cavity(P(v), {t}, cav)) fail(ErrorKind::InvalidRegion, "degenerate boundary input");
      commit(v, cav);
      hint = created_.front();
    }

    // Recover boundary segments by splitting until each appears as an edge.
    std::deque<std::pair<int, int>> pending(segments_.begin(), segments_.end());
    segments_.clear();
    while (!pending.empty()) {
      auto [a, b] = pending.front();
      pending.pop_front();
      const int t_ab = find_directed_edge(a, b);
      const int t_ba = find_directed_edge(b, a);
      if (t_ab != kNone || t_ba != kNone) {
        set_constrained(t_ab, a, b);
        set_constrained(t_ba, b, a);
        segments_.push_back({a, b});
        continue;
      }
      const Point2 mid = split_point(a, b);
      const int v = add_point(mid, false);
      const int t = locate(mid, vtri_[a]);
      if (!build_cavity(mid, {t}, cav)) fail(ErrorKind::InvalidRegion, "boundary segments intersect");
      commit(v, cav);
      ++segment_splits_;
      pending.push_back({a, v});
      pending.push_back({v, b});
    }
  }

  void set_constrained(int t, int a, int b) {
    if (t == kNone) return;
    tris_[t].c[edge_index(tris_[t], a, b)] = true;
  }

  void carve_exterior() {
    ++stamp_;
    std::vector<int> component;
    for (int seed = 0; seed < static_cast<int>(tris_.size()); ++seed) {
      if (!tris_[seed].alive || mark_[seed] == stamp_) continue;
      component.clear();
      component.push_back(seed);
      mark_[seed] = stamp_;
      for (std::size_t k = 0; k < component.size(); ++k) {
        const Tri& t = tris_[component[k]];
        for (int i = 0; i < 3; ++i) {
          const int nb = t.n[i];
          if (nb == kNone || t.c[i] || mark_[nb] == stamp_) continue;
          mark_[nb] = stamp_;
          component.push_back(nb);
        }
      }
      const Tri& probe = tris_[component.front()];
      bool touches_super = false;
      for (int id : component)
        for (int v : tris_[id].v) touches_super |= v < 3;
      const Point2 c = (P(probe.v[0]) + P(probe.v[1]) + P(probe.v[2])) * (1.0 / 3.0);
      if (touches_super || !region_.contains(c + center_))
        for (int id : component) exterior_.push_back(id);
    }
    for (int id : exterior_) {
      for (int nb : tris_[id].n) {
        if (nb == kNone || !tris_[nb].alive) continue;
        for (int& back : tris_[nb].n)
          if (back == id) back = kNone;
      }
    }
    for (int id : exterior_) kill_tri(id);
    std::fill(vtri_.begin(), vtri_.end(), kNone);
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id)
      if (tris_[id].alive)
        for (int v : tris_[id].v) vtri_[v] = id;
  }

  // ---- phase 2 -------------------------------------------------------------

  Point2 split_point(int a, int b) const {
    const Point2 pa = P(a), pb = P(b);
    const double len = norm(pb - pa);
    if (!(len > 1e-12 * scale_))
      fail(ErrorKind::NonTerminatingRefinement, "segment split below numerical resolution");
    // Concentric shells around input vertices keep splits at powers of two.
    if (is_input_[a] != is_input_[b]) {
      const Point2 origin = is_input_[a] ? pa : pb;
      const Point2 dir = (is_input_[a] ? pb - pa : pa - pb) * (1.0 / len);
      const double d = std::exp2(std::round(std::log2(0.5 * len)));
      return origin + dir * d;
    }
    return (pa + pb) * 0.5;
  }

  bool segment_alive(int a, int b) const { return live_segments_.count(edge_key(a, b)) != 0; }

  // Interior triangle holding segment (a, b) in either orientation.
  int segment_tri(int a, int b) const {
    const int t = find_directed_edge(a, b);
    return t != kNone ? t : find_directed_edge(b, a);
  }

  bool encroached(int a, int b) const {
    const int t = segment_tri(a, b);
    if (t == kNone) return false;
    const Tri& tri = tris_[t];
    for (int v : tri.v) {
      if (v == a || v == b) continue;
      return dot(P(a) - P(v), P(b) - P(v)) < 0.0;
    }
    return false;
  }

  void push_bad(int id) {
    if (is_bad(id)) bad_.push_back({id, tris_[id].v});
  }

  void split_segment(int a, int b) {
    const Point2 m = split_point(a, b);
    const int t0 = segment_tri(a, b);
    if (t0 == kNone) return;
    const Tri& tri = tris_[t0];
    const int i = index_of(tri, a);
    const int edge = tri.v[(i + 1) % 3] == b ? (i + 2) % 3 : (i + 1) % 3;
    const int t1 = tri.n[edge];
    const int v = add_point(m, false);
    Cavity& cav = cavity_;
    if (!build_cavity(m, {t0, t1}, cav, a, b))
      fail(ErrorKind::NonTerminatingRefinement, "segment split point is not visible");
    commit(v, cav, a, b);
    ++segment_splits_;
    live_segments_.erase(edge_key(a, b));
    live_segments_.insert(edge_key(a, v));
    live_segments_.insert(edge_key(v, b));
    seg_queue_.push_back({a, v});
    seg_queue_.push_back({v, b});
    for (const BoundaryEdge& e : cav.edges)
      if (e.constrained) seg_queue_.push_back({e.a, e.b});
    for (int id : std::vector<int>(created_)) push_bad(id);
  }

  // Straight walk from the centroid of `start` towards p. Returns the
  // triangle holding p, or kNone with (block_tri, block_edge) set when a
  // constrained edge is in the way.
  int walk_to(int start, Point2 p, int& block_tri, int& block_edge) const {
    const Tri& s = tris_[start];
    const Point2 o = (P(s.v[0]) + P(s.v[1]) + P(s.v[2])) * (1.0 / 3.0);
    int t = start;
    for (int steps = 0; steps < 1 << 20; ++steps) {
      const Tri& tri = tris_[t];
      int exit = kNone, fallback = kNone;
      for (int i = 0; i < 3; ++i) {
        const Point2 a = P(tri.v[(i + 1) % 3]), b = P(tri.v[(i + 2) % 3]);
        if (orient(a, b, p) >= 0.0) continue;
        if (fallback == kNone) fallback = i;
        const double sa = orient(o, p, a), sb = orient(o, p, b);
        if ((sa >= 0.0 && sb <= 0.0) || (sa <= 0.0 && sb >= 0.0)) {
          exit = i;
          break;
        }
      }
      if (exit == kNone) exit = fallback;
      if (exit == kNone) return t;
      if (tri.c[exit] || tri.n[exit] == kNone) {
        block_tri = t;
        block_edge = exit;
        return kNone;
      }
      t = tri.n[exit];
    }
    fail(ErrorKind::NonTerminatingRefinement, "walk towards circumcenter did not terminate");
  }

  void split_blocking(int t, int edge) {
    const Tri& tri = tris_[t];
    const int a = tri.v[(edge + 1) % 3], b = tri.v[(edge + 2) % 3];
    if (segment_alive(a, b)) split_segment(a, b);
  }

  void refine() {
    for (const auto& [a, b] : segments_) live_segments_.insert(edge_key(a, b));
    for (const auto& s : segments_) seg_queue_.push_back(s);
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id)
      if (tris_[id].alive) push_bad(id);

    while (true) {
      if (!seg_queue_.empty()) {
        auto [a, b] = seg_queue_.front();
        seg_queue_.pop_front();
        if (segment_alive(a, b) && encroached(a, b)) split_segment(a, b);
        continue;
      }
      if (bad_.empty()) break;
      const QueuedTri q = bad_.front();
      bad_.pop_front();
      if (!tris_[q.id].alive || tris_[q.id].v != q.v || !is_bad(q.id)) continue;

      const Tri& tri = tris_[q.id];
      const Point2 c = circumcenter(P(tri.v[0]), P(tri.v[1]), P(tri.v[2]));
      int block_tri = kNone, block_edge = kNone;
      const int host = walk_to(q.id, c, block_tri, block_edge);
      if (host == kNone) {
        split_blocking(block_tri, block_edge);
        bad_.push_back(q);
        continue;
      }
      Cavity& cav = cavity_;
      if (!build_cavity(c, {host}, cav)) {
        split_blocking(cav.block_tri, cav.block_edge);
        bad_.push_back(q);
        continue;
      }
      std::vector<std::pair<int, int>> hit;
      for (const BoundaryEdge& e : cav.edges)
        if (e.constrained && dot(P(e.a) - c, P(e.b) - c) < 0.0) hit.push_back({e.a, e.b});
      if (!hit.empty()) {
        for (const auto& [a, b] : hit)
          if (segment_alive(a, b)) split_segment(a, b);
        bad_.push_back(q);
        continue;
      }
      const int v = add_point(c, false);
      commit(v, cav);
      for (int id : std::vector<int>(created_)) push_bad(id);
    }
  }

  const PolygonalDomain& region_;
  MeshOptions options_;
  Point2 center_;
  double scale_ = 1.0;
  double sin_min_angle_sq_ = 0.0;

  std::vector<Point2> pts_;
  std::vector<char> is_input_;
  std::vector<int> vtri_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;

  std::vector<int> scratch_;
  std::vector<int> created_;
  std::vector<int> exterior_;
  Cavity cavity_;

  std::vector<std::pair<int, int>> segments_;
  std::unordered_set<std::uint64_t> live_segments_;
  std::deque<std::pair<int, int>> seg_queue_;
  std::deque<QueuedTri> bad_;

  std::size_t insertions_ = 0;
  std::size_t segment_splits_ = 0;
};

}  // namespace

Triangulation triangulate(const PolygonalDomain& region, const MeshOptions& options, MeshStats* stats) {
  if (!(options.max_area > 0.0)) fail(ErrorKind::InvalidRegion, "max_area must be positive");
  if (!(options.min_angle >= 0.0) || options.min_angle >= kPi / 3.0)
    fail(ErrorKind::InvalidRegion, "min_angle must lie in [0, 60) degrees");
  if (options.min_angle > region.min_boundary_angle() + 1e-12)
    fail(ErrorKind::InvalidRegion, "min_angle exceeds the smallest boundary angle of the region");
  Mesher mesher(region, options);
  return mesher.run(stats);
}

Triangulation triangulate(const PolygonalDomain& region, double max_area, double min_angle) {
  MeshOptions options;
  options.max_area = max_area;
  options.min_angle = min_angle;
  return triangulate(region, options);
}

}  // namespace ksmooth
