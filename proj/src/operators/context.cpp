#include <algorithm>
#include <cmath>

#include "ksmooth/operators.hpp"

namespace ksmooth {

SmoothingContext::SmoothingContext(PolygonalDomain domain, QuadratureRule domain_rule, ScaledKernel kernel,
                                   double degree_floor)
    : domain_(std::move(domain)),
      rule_(std::move(domain_rule)),
      kernel_(std::move(kernel)),
      floor_(degree_floor),
      cache_(std::make_unique<Cache>()) {
  if (!(degree_floor > 0.0 && degree_floor < 1.0))
    fail(ErrorKind::InvalidArgument, "degree floor must lie in (0, 1)");
  if (!kernel_.shape().axioms().smoothing_axioms())
    fail(ErrorKind::UnsupportedShape, "shape function lacks the smoothing axioms K1-K4");
  if (rule_.nodes.empty()) fail(ErrorKind::InvalidArgument, "domain rule has no nodes");
  if (rule_.weights.size() != rule_.nodes.size())
    fail(ErrorKind::InvalidArgument, "domain rule node and weight counts differ");
  for (std::size_t j = 0; j < rule_.nodes.size(); ++j) {
    if (!(rule_.weights[j] > 0.0)) fail(ErrorKind::InvariantViolation, "domain rule weight is not positive");
    if (!domain_.contains(rule_.nodes[j]))
      fail(ErrorKind::InvariantViolation, "domain rule node " + std::to_string(j) + " lies outside the domain");
  }
  index_ = NodeIndex(rule_.nodes, rule_.weights);
}

const std::vector<double>& SmoothingContext::node_degree() const {
  std::call_once(cache_->degree_once, [this] {
    const std::size_t n = index_.size();
    std::vector<double> d(n);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::size_t k = 0; k < n; ++k) d[k] = degree_unchecked(*this, index_.node(k));
    cache_->degree = std::move(d);
  });
  return cache_->degree;
}

const std::vector<double>& SmoothingContext::node_q() const {
  std::call_once(cache_->q_once, [this] {
    const auto& d = node_degree();
    const auto worst = std::min_element(d.begin(), d.end());
    if (*worst < floor_) {
      const std::size_t k = static_cast<std::size_t>(worst - d.begin());
      throw DegreeBelowFloorError(index_.node(k), *worst, floor_);
    }
    const std::size_t n = index_.size();
    const auto& w = index_.weights();
    const double radius = kernel_.truncation_radius();
    std::vector<double> q(n);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      index_.for_each_within(index_.node(k), radius,
                             [&](std::uint32_t j, double r2) { s += w[j] * kernel_.from_distance_sq(r2) / d[j]; });
      q[k] = s;
    }
    cache_->q = std::move(q);
  });
  return cache_->q;
}

PiecewiseField::PiecewiseField(std::size_t dim, std::vector<FieldPiece> pieces)
    : dim_(dim), pieces_(std::move(pieces)) {
  if (dim_ == 0) fail(ErrorKind::InvalidArgument, "field dimension must be positive");
  std::vector<Point2> nodes;
  std::vector<double> weights, values;
  for (std::size_t l = 0; l < pieces_.size(); ++l) {
    const auto& p = pieces_[l];
    if (p.rule.weights.size() != p.rule.nodes.size() || p.values.size() != p.rule.size() * dim_)
      fail(ErrorKind::InvalidArgument, "piece " + std::to_string(l) + " has mismatched sizes");
    for (double v : p.values)
      if (!std::isfinite(v))
        fail(ErrorKind::NonFiniteIntegrand, "piece " + std::to_string(l) + " has a non-finite value");
    nodes.insert(nodes.end(), p.rule.nodes.begin(), p.rule.nodes.end());
    weights.insert(weights.end(), p.rule.weights.begin(), p.rule.weights.end());
    values.insert(values.end(), p.values.begin(), p.values.end());
  }
  index_ = NodeIndex(nodes, weights);
  values_ = index_.permute(values, dim_);
}

double PiecewiseField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

FieldPiece sample_piece(Polygon polygon, QuadratureRule rule, std::size_t dim,
                        const std::function<void(Point2, double*)>& f) {
  std::vector<double> values(rule.size() * dim);
  for (std::size_t j = 0; j < rule.size(); ++j) f(rule.nodes[j], values.data() + j * dim);
  return {std::move(polygon), std::move(rule), std::move(values)};
}

FieldPiece constant_piece(Polygon polygon, QuadratureRule rule, std::span<const double> value) {
  std::vector<double> values;
  values.reserve(rule.size() * value.size());
  for (std::size_t j = 0; j < rule.size(); ++j) values.insert(values.end(), value.begin(), value.end());
  return {std::move(polygon), std::move(rule), std::move(values)};
}

}  // namespace ksmooth
