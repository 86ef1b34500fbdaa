#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ksmooth/geometry.hpp"
#include "ksmooth/kernels.hpp"

namespace ksmooth {

enum class RuleKind : std::uint8_t { TriangulationCentroid = 0, MonteCarlo = 1 };

struct RuleProvenance {
  RuleKind kind = RuleKind::TriangulationCentroid;
  // TriangulationCentroid
  double min_angle = 0.0;
  double max_area = 0.0;
  // MonteCarlo
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;  // M
  Rect box{};                // sampling rectangle R
  std::string rng = {};
};

/// Nodes and positive weights approximating ∫ over a region.
struct QuadratureRule {
  std::vector<Point2> nodes;
  std::vector<double> weights;
  RuleProvenance provenance;
  double region_area = 0.0;  // exact area of the region the rule was built for

  std::size_t size() const noexcept { return nodes.size(); }
  double weight_sum() const;
};

QuadratureRule rule_from_triangulation(const Triangulation& t);

/// Rejection sampling in the bounding rectangle until `n` nodes land inside.
/// Throws RejectionStall when acceptance stays below 1e-4 after 1e6 trials.
QuadratureRule rule_monte_carlo(const PolygonalDomain& region, std::size_t n, std::uint64_t seed);

/// Σ w_j f(y_j). Throws NonFiniteIntegrand on a NaN or infinite evaluation.
template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double v = f(rule.nodes[j]);
    if (!std::isfinite(v))
      fail(ErrorKind::NonFiniteIntegrand, "integrand is not finite at node " + std::to_string(j));
    s += rule.weights[j] * v;
  }
  return s;
}

/// δ_ε Σ_j area(T_j) diam(T_j) with δ_ε = sup|h_ε'|. Gaussian kernels only.
double triangulation_error_bound(const Triangulation& t, const ScaledKernel& kernel);

/// s · |R| / |Y| · N^{-1/2}, s the sample standard deviation of f over the
/// nodes and |Y| the weight sum. Throws InsufficientSamples for N < 2.
template <class F>
double monte_carlo_error_estimate(const QuadratureRule& rule, F&& f) {
  if (rule.provenance.kind != RuleKind::MonteCarlo)
    fail(ErrorKind::InvalidArgument, "Monte Carlo error estimate needs a Monte Carlo rule");
  const std::size_t n = rule.size();
  if (n < 2) fail(ErrorKind::InsufficientSamples, "need at least 2 samples");
  std::vector<double> values(n);
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    values[j] = f(rule.nodes[j]);
    if (!std::isfinite(values[j])) fail(ErrorKind::NonFiniteIntegrand, "integrand is not finite");
    mean += values[j];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / static_cast<double>(n - 1));
  return s * rule.provenance.box.area() / rule.weight_sum() / std::sqrt(static_cast<double>(n));
}

enum class RuleBackend { Triangulation, MonteCarlo };
RuleBackend parse_rule_backend(const std::string& name);  // "tri" | "mc"

struct RuleOptions {
  RuleBackend backend = RuleBackend::Triangulation;
  double max_area = 0.0;
  double min_angle = 20.0 * kPi / 180.0;
  std::size_t mc_n = 10'000;
  std::uint64_t seed = 0;
};

/// Builds a rule of the requested kind; `mesh` receives the triangulation
/// when the backend is Triangulation.
QuadratureRule build_rule(const PolygonalDomain& region, const RuleOptions& opt, Triangulation* mesh = nullptr);

/// Binary sidecar: magic, provenance, node count, then (x, y, w) triples.
std::string rule_to_bytes(const QuadratureRule& rule);
QuadratureRule rule_from_bytes(const std::string& bytes);
void save_rule(const std::string& path, const QuadratureRule& rule);
QuadratureRule load_rule(const std::string& path);

}  // namespace ksmooth
