#include <algorithm>

#include "ksmooth/operators.hpp"

namespace ksmooth {
namespace {

// Σ w k(x, y) v(y) over an index, accumulated into out[0..dim).
void kernel_sum(const ScaledKernel& k, const NodeIndex& index, const double* values, std::size_t dim,
                Point2 x, double* out) {
  std::fill(out, out + dim, 0.0);
  const auto& w = index.weights();
  index.for_each_within(x, k.truncation_radius(), [&](std::uint32_t j, double r2) {
    const double c = w[j] * k.from_distance_sq(r2);
    const double* v = values + std::size_t(j) * dim;
    for (std::size_t i = 0; i < dim; ++i) out[i] += c * v[i];
  });
}

}  // namespace

double degree_unchecked(const SmoothingContext& ctx, Point2 x) {
  const auto& k = ctx.kernel();
  const auto& w = ctx.index().weights();
  double s = 0.0;
  ctx.index().for_each_within(x, k.truncation_radius(),
                              [&](std::uint32_t j, double r2) { s += w[j] * k.from_distance_sq(r2); });
  return s;
}

double degree(const SmoothingContext& ctx, Point2 x) {
  const double d = degree_unchecked(ctx, x);
  if (!(d >= ctx.degree_floor())) throw DegreeBelowFloorError(x, d, ctx.degree_floor());
  return d;
}

std::vector<double> markov_smooth(const SmoothingContext& ctx, const PiecewiseField& field, Point2 x) {
  const double d = degree(ctx, x);
  std::vector<double> out(field.dim());
  kernel_sum(ctx.kernel(), field.index(), field.values().data(), field.dim(), x, out.data());
  for (auto& v : out) v /= d;
  return out;
}

double q_function(const SmoothingContext& ctx, Point2 x) {
  const auto& d = ctx.node_degree();
  const auto& w = ctx.index().weights();
  const auto& k = ctx.kernel();
  double s = 0.0;
  bool low = false;
  ctx.index().for_each_within(x, k.truncation_radius(), [&](std::uint32_t j, double r2) {
    const double kv = k.from_distance_sq(r2);
    if (kv == 0.0) return;
    if (d[j] < ctx.degree_floor()) low = true;
    s += w[j] * kv / d[j];
  });
  if (low) {
    // Report the offending node nearest to x.
    double best = -1.0;
    std::uint32_t at = 0;
    ctx.index().for_each_within(x, k.truncation_radius(), [&](std::uint32_t j, double r2) {
      if (d[j] < ctx.degree_floor() && k.from_distance_sq(r2) > 0.0 && (best < 0.0 || r2 < best)) {
        best = r2;
        at = j;
      }
    });
    throw DegreeBelowFloorError(ctx.index().node(at), d[at], ctx.degree_floor());
  }
  return s;
}

BistochasticPrepared prepare_bistochastic(const SmoothingContext& ctx, const PiecewiseField& field,
                                          bool parallel) {
  const std::size_t dim = field.dim();
  const NodeIndex& fi = field.index();
  const std::size_t nf = fi.size();

  std::vector<double> fd(field.values());
  std::vector<double> field_degree(nf);
#pragma omp parallel for schedule(dynamic, 256) if (parallel)
  for (std::size_t k = 0; k < nf; ++k) field_degree[k] = degree_unchecked(ctx, fi.node(k));
  for (std::size_t k = 0; k < nf; ++k) {
    if (!(field_degree[k] >= ctx.degree_floor()))
      throw DegreeBelowFloorError(fi.node(k), field_degree[k], ctx.degree_floor());
    for (std::size_t c = 0; c < dim; ++c) fd[k * dim + c] /= field_degree[k];
  }

  const auto& q = ctx.node_q();
  const NodeIndex& di = ctx.index();
  BistochasticPrepared prep;
  prep.dim = dim;
  prep.g.assign(di.size() * dim, 0.0);
#pragma omp parallel for schedule(dynamic, 256) if (parallel)
  for (std::size_t j = 0; j < di.size(); ++j) {
    double* g = prep.g.data() + j * dim;
    kernel_sum(ctx.kernel(), fi, fd.data(), dim, di.node(j), g);
    for (std::size_t c = 0; c < dim; ++c) g[c] /= q[j];
  }
  return prep;
}

std::vector<double> bistochastic_smooth(const SmoothingContext& ctx, const BistochasticPrepared& prep,
                                        Point2 x) {
  const double d = degree(ctx, x);
  std::vector<double> out(prep.dim);
  kernel_sum(ctx.kernel(), ctx.index(), prep.g.data(), prep.dim, x, out.data());
  for (auto& v : out) v /= d;
  return out;
}

std::vector<double> bistochastic_smooth(const SmoothingContext& ctx, const PiecewiseField& field,
                                        Point2 x) {
  return bistochastic_smooth(ctx, prepare_bistochastic(ctx, field), x);
}

const char* to_string(OperatorKind op) { return op == OperatorKind::Markov ? "markov" : "bistochastic"; }

OperatorKind parse_operator_kind(const std::string& name) {
  if (name == "markov") return OperatorKind::Markov;
  if (name == "bistochastic") return OperatorKind::Bistochastic;
  fail(ErrorKind::InvalidArgument, "unknown operator '" + name + "' (expected markov|bistochastic)");
}

}  // namespace ksmooth
