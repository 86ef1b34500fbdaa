#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ksmooth/common.hpp"

namespace ksmooth {

/// Uniform-bin spatial index over weighted nodes. Nodes are stored permuted
/// into bin order; `order()[k]` is the input position of stored node k.
/// Queries visit bins row by row, so the summation order for a given query
/// point is fixed regardless of threading.
class NodeIndex {
 public:
  NodeIndex() = default;
  NodeIndex(const std::vector<Point2>& nodes, const std::vector<double>& weights);

  std::size_t size() const noexcept { return x_.size(); }
  const std::vector<double>& xs() const noexcept { return x_; }
  const std::vector<double>& ys() const noexcept { return y_; }
  const std::vector<double>& weights() const noexcept { return w_; }
  const std::vector<std::uint32_t>& order() const noexcept { return order_; }
  Point2 node(std::size_t k) const { return {x_[k], y_[k]}; }

  /// Calls f(k, r2) for every stored node k with squared distance r2 <= radius².
  template <class F>
  void for_each_within(Point2 p, double radius, F&& f) const {
    if (x_.empty()) return;
    if (p.x + radius < lo_.x || p.x - radius > hi_.x || p.y + radius < lo_.y || p.y - radius > hi_.y)
      return;
    const double r2max = radius * radius;
    const long i0 = clamp_col(std::floor((p.x - radius - lo_.x) * inv_h_));
    const long i1 = clamp_col(std::floor((p.x + radius - lo_.x) * inv_h_));
    const long j0 = clamp_row(std::floor((p.y - radius - lo_.y) * inv_h_));
    const long j1 = clamp_row(std::floor((p.y + radius - lo_.y) * inv_h_));
    for (long j = j0; j <= j1; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nx_;
      const std::uint32_t begin = start_[row + i0];
      const std::uint32_t end = start_[row + i1 + 1];
      for (std::uint32_t k = begin; k < end; ++k) {
        const double dx = x_[k] - p.x, dy = y_[k] - p.y;
        const double r2 = dx * dx + dy * dy;
        if (r2 <= r2max) f(k, r2);
      }
    }
  }

  /// Reorders a node-major array with `dim` values per node into stored order.
  std::vector<double> permute(const std::vector<double>& values, std::size_t dim) const;

 private:
  long clamp_col(double v) const { return static_cast<long>(std::clamp(v, 0.0, double(nx_ - 1))); }
  long clamp_row(double v) const { return static_cast<long>(std::clamp(v, 0.0, double(ny_ - 1))); }

  std::vector<double> x_, y_, w_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> start_;  // nx*ny + 1 offsets, row-major bins
  Point2 lo_{}, hi_{};
  double inv_h_ = 1.0;
  std::size_t nx_ = 1, ny_ = 1;
};

}  // namespace ksmooth
