#include "ksmooth/node_index.hpp"

#include <limits>

namespace ksmooth {

NodeIndex::NodeIndex(const std::vector<Point2>& nodes, const std::vector<double>& weights) {
  const std::size_t n = nodes.size();
  if (weights.size() != n) fail(ErrorKind::InvalidArgument, "node and weight counts differ");
  if (n > std::numeric_limits<std::uint32_t>::max() - 1)
    fail(ErrorKind::InvalidArgument, "too many nodes for the index");
  if (n == 0) return;

  lo_ = hi_ = nodes[0];
  for (const auto& p : nodes) {
    lo_.x = std::min(lo_.x, p.x);
    lo_.y = std::min(lo_.y, p.y);
    hi_.x = std::max(hi_.x, p.x);
    hi_.y = std::max(hi_.y, p.y);
  }
  const double w = hi_.x - lo_.x, h = hi_.y - lo_.y;
  const double extent = std::max({w, h, 1e-300});
  // About four nodes per bin for evenly spread nodes.
  double cell = std::sqrt(std::max(w, extent * 1e-6) * std::max(h, extent * 1e-6) * 4.0 / double(n));
  cell = std::max(cell, extent / 4096.0);
  inv_h_ = 1.0 / cell;
  nx_ = static_cast<std::size_t>(std::floor(w * inv_h_)) + 1;
  ny_ = static_cast<std::size_t>(std::floor(h * inv_h_)) + 1;

  std::vector<std::uint32_t> bin(n);
  std::vector<std::uint32_t> count(nx_ * ny_ + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(clamp_col(std::floor((nodes[k].x - lo_.x) * inv_h_)));
    const auto j = static_cast<std::size_t>(clamp_row(std::floor((nodes[k].y - lo_.y) * inv_h_)));
    bin[k] = static_cast<std::uint32_t>(j * nx_ + i);
    ++count[bin[k] + 1];
  }
  start_.assign(nx_ * ny_ + 1, 0);
  for (std::size_t b = 0; b < nx_ * ny_; ++b) start_[b + 1] = start_[b] + count[b + 1];

  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  x_.resize(n);
  y_.resize(n);
  w_.resize(n);
  order_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t slot = fill[bin[k]]++;
    x_[slot] = nodes[k].x;
    y_[slot] = nodes[k].y;
    w_[slot] = weights[k];
    order_[slot] = static_cast<std::uint32_t>(k);
  }
}

std::vector<double> NodeIndex::permute(const std::vector<double>& values, std::size_t dim) const {
  if (values.size() != size() * dim) fail(ErrorKind::InvalidArgument, "value count does not match nodes");
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < size(); ++k)
    for (std::size_t c = 0; c < dim; ++c) out[k * dim + c] = values[order_[k] * dim + c];
  return out;
}

}  // namespace ksmooth
