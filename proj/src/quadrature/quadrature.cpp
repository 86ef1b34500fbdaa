#include "ksmooth/quadrature.hpp"

#include <numeric>

#include "ksmooth/rng.hpp"

namespace ksmooth {

double QuadratureRule::weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

QuadratureRule rule_from_triangulation(const Triangulation& t) {
  QuadratureRule rule;
  rule.nodes.reserve(t.triangles.size());
  rule.weights.reserve(t.triangles.size());
  for (const auto& tri : t.triangles) {
    rule.nodes.push_back(tri.centroid());
    rule.weights.push_back(0.5 * std::abs(orient(tri.v[0], tri.v[1], tri.v[2])));
  }
  rule.provenance.kind = RuleKind::TriangulationCentroid;
  rule.provenance.min_angle = t.min_angle;
  rule.provenance.max_area = t.max_area;
  rule.region_area = rule.weight_sum();
  return rule;
}

QuadratureRule rule_monte_carlo(const PolygonalDomain& region, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "Monte Carlo rule needs N >= 1");
  const Rect box = bounding_rectangle(region);
  CounterRng rng(seed);
  QuadratureRule rule;
  rule.nodes.reserve(n);
  std::uint64_t trials = 0;
  while (rule.nodes.size() < n) {
    const Point2 p{box.lo.x + box.width() * rng.next_uniform(),
                   box.lo.y + box.height() * rng.next_uniform()};
    ++trials;
    if (region.contains(p)) rule.nodes.push_back(p);
    if (trials >= 1'000'000 && static_cast<double>(rule.nodes.size()) < 1e-4 * static_cast<double>(trials))
      fail(ErrorKind::RejectionStall, "acceptance ratio below 1e-4 after " + std::to_string(trials) +
                                          " trials");
  }
  rule.weights.assign(n, box.area() / static_cast<double>(trials));
  rule.provenance.kind = RuleKind::MonteCarlo;
  rule.provenance.seed = seed;
  rule.provenance.trials = trials;
  rule.provenance.box = box;
  rule.provenance.rng = CounterRng::kAlgorithm;
  rule.region_area = region.area();
  return rule;
}

double triangulation_error_bound(const Triangulation& t, const ScaledKernel& kernel) {
  const double delta = radial_derivative_sup(kernel);
  double s = 0.0;
  for (const auto& tri : t.triangles) {
    const auto m = triangle_metrics(tri);
    s += m.area * m.diameter;
  }
  return delta * s;
}

RuleBackend parse_rule_backend(const std::string& name) {
  if (name == "tri") return RuleBackend::Triangulation;
  if (name == "mc") return RuleBackend::MonteCarlo;
  fail(ErrorKind::InvalidArgument, "unknown quadrature '" + name + "' (expected tri|mc)");
}

QuadratureRule build_rule(const PolygonalDomain& region, const RuleOptions& opt, Triangulation* mesh) {
  if (opt.backend == RuleBackend::MonteCarlo) return rule_monte_carlo(region, opt.mc_n, opt.seed);
  Triangulation t = triangulate(region, opt.max_area, opt.min_angle);
  QuadratureRule rule = rule_from_triangulation(t);
  if (mesh) *mesh = std::move(t);
  return rule;
}

}  // namespace ksmooth
