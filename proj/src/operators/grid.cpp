#include <algorithm>
#include <cmath>
#include <limits>

#include "ksmooth/operators.hpp"

namespace ksmooth {

EvaluationGrid::EvaluationGrid(const PolygonalDomain& domain, std::size_t resolution)
    : nx_(resolution), ny_(resolution) {
  if (resolution < 2) fail(ErrorKind::InvalidArgument, "grid resolution must be at least 2");
  const Rect box = bounding_rectangle(domain);
  const double side = std::max(box.width(), box.height());
  square_ = {box.lo, {box.lo.x + side, box.lo.y + side}};
  mask_.resize(size());
  for (std::size_t k = 0; k < size(); ++k) mask_[k] = domain.contains(point(k)) ? 1 : 0;
}

EvaluationGrid::EvaluationGrid(Rect square, std::size_t nx, std::size_t ny, std::vector<std::uint8_t> mask)
    : square_(square), nx_(nx), ny_(ny), mask_(std::move(mask)) {
  if (nx < 1 || ny < 1 || mask_.size() != nx * ny)
    fail(ErrorKind::InvalidArgument, "grid shape does not match its mask");
}

Point2 EvaluationGrid::point(std::size_t index) const {
  const std::size_t i = index % nx_, j = index / nx_;
  return {square_.lo.x + (double(i) + 0.5) * cell_width(), square_.lo.y + (double(j) + 0.5) * cell_height()};
}

std::size_t EvaluationGrid::inside_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

namespace {

GridValues evaluate(const SmoothingContext& ctx, const PiecewiseField& field, const EvaluationGrid& grid,
                    OperatorKind op, bool parallel) {
  const std::size_t dim = field.dim();
  const std::size_t n = grid.size();
  GridValues out(grid, dim);

  BistochasticPrepared prep;
  const NodeIndex* index = &field.index();
  const double* source = field.values().data();
  if (op == OperatorKind::Bistochastic) {
    prep = prepare_bistochastic(ctx, field, parallel);
    index = &ctx.index();
    source = prep.g.data();
  }

  const ScaledKernel& k = ctx.kernel();
  const double radius = k.truncation_radius();
  const double floor = ctx.degree_floor();
  std::vector<double> degrees(n, std::numeric_limits<double>::infinity());

#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (std::size_t p = 0; p < n; ++p) {
    if (!grid.inside(p)) continue;
    const Point2 x = grid.point(p);
    const double d = degree_unchecked(ctx, x);
    degrees[p] = d;
    if (!(d >= floor)) continue;
    double* v = out.values.data() + p * dim;
    std::fill(v, v + dim, 0.0);
    const auto& w = index->weights();
    index->for_each_within(x, radius, [&](std::uint32_t j, double r2) {
      const double c = w[j] * k.from_distance_sq(r2);
      const double* s = source + std::size_t(j) * dim;
      for (std::size_t i = 0; i < dim; ++i) v[i] += c * s[i];
    });
    for (std::size_t i = 0; i < dim; ++i) v[i] /= d;
  }

  out.min_degree = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n; ++p) {
    if (!grid.inside(p)) continue;
    out.min_degree = std::min(out.min_degree, degrees[p]);
    if (!(degrees[p] >= floor)) {
      ++out.failures;
      out.failure_locations.push_back(grid.point(p));
    }
  }
  return out;
}

}  // namespace

GridValues evaluate_grid(const SmoothingContext& ctx, const PiecewiseField& field, const EvaluationGrid& grid,
                         OperatorKind op) {
  return evaluate(ctx, field, grid, op, true);
}

GridValues evaluate_grid_serial(const SmoothingContext& ctx, const PiecewiseField& field,
                                const EvaluationGrid& grid, OperatorKind op) {
  return evaluate(ctx, field, grid, op, false);
}

GridValues sample_grid(const EvaluationGrid& grid, std::size_t dim, const std::function<void(Point2, double*)>& f) {
  GridValues out(grid, dim);
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (grid.inside(p)) f(grid.point(p), out.values.data() + p * dim);
  out.min_degree = std::numeric_limits<double>::quiet_NaN();
  return out;
}

const char* to_string(LpNorm p) {
  switch (p) {
    case LpNorm::L1: return "l1";
    case LpNorm::L2: return "l2";
    case LpNorm::Linf: return "linf";
  }
  return "?";
}

double lp_error(const GridValues& a, const GridValues& b, LpNorm p, double cell_area) {
  if (a.dim != b.dim || a.grid.nx() != b.grid.nx() || a.grid.ny() != b.grid.ny() || a.grid.mask() != b.grid.mask())
    fail(ErrorKind::GridMismatch, "grids differ in shape, dimension or mask");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.grid.size(); ++k) {
    if (!a.grid.inside(k)) continue;
    double e2 = 0.0;
    for (std::size_t c = 0; c < a.dim; ++c) {
      const double diff = a.at(k)[c] - b.at(k)[c];
      e2 += diff * diff;
    }
    const double e = std::sqrt(e2);
    switch (p) {
      case LpNorm::L1: acc += e * cell_area; break;
      case LpNorm::L2: acc += e2 * cell_area; break;
      case LpNorm::Linf: acc = std::max(acc, e); break;
    }
  }
  return p == LpNorm::L2 ? std::sqrt(acc) : acc;
}

}  // namespace ksmooth
