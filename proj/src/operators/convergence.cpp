#include <cmath>
#include <limits>
#include <sstream>

#include "ksmooth/operators.hpp"

namespace ksmooth {
namespace {

GridValues smooth_on_grid(const ConvergenceInput& in, const QuadratureLevel& level, double eps) {
  if (!level.field) fail(ErrorKind::InvalidArgument, "quadrature level has no field");
  SmoothingContext ctx(in.domain, level.domain_rule, ScaledKernel(in.shape, eps), in.degree_floor);
  GridValues g = evaluate_grid(ctx, *level.field, in.grid, in.op);
  if (g.failures > 0) {
    const Point2 at = g.failure_locations.front();
    throw DegreeBelowFloorError(at, degree_unchecked(ctx, at), in.degree_floor);
  }
  return g;
}

// (Σ_ℓ sup|f_ℓ| B_ℓ + sup|f| B_Ω) / min d, a bound on the quadrature error of N/D.
double apriori_bound(const ConvergenceInput& in, const QuadratureLevel& level, double eps, double min_degree) {
  if (in.shape.kind() != ShapeKind::Gaussian || !level.domain_mesh) return std::numeric_limits<double>::quiet_NaN();
  const ScaledKernel k(in.shape, eps);
  const auto& pieces = level.field->pieces();
  if (level.piece_meshes.size() != pieces.size()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (std::size_t l = 0; l < pieces.size(); ++l) {
    double sup = 0.0;
    for (double v : pieces[l].values) sup = std::max(sup, std::abs(v));
    total += sup * triangulation_error_bound(level.piece_meshes[l], k);
  }
  total += level.field->sup_norm() * triangulation_error_bound(*level.domain_mesh, k);
  return total / min_degree;
}

double pick(const ConvergenceRow& r, LpNorm p) {
  switch (p) {
    case LpNorm::L1: return r.l1;
    case LpNorm::L2: return r.l2;
    case LpNorm::Linf: return r.linf;
  }
  return r.l1;
}

}  // namespace

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::InvalidArgument, "slope needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceResult convergence_study(const ConvergenceInput& in) {
  if (in.epsilons.empty()) fail(ErrorKind::InvalidArgument, "epsilon list is empty");
  for (std::size_t i = 1; i < in.epsilons.size(); ++i)
    if (!(in.epsilons[i] < in.epsilons[i - 1]))
      fail(ErrorKind::InvalidArgument, "epsilon list must be strictly decreasing");

  const GridValues exact = sample_grid(in.grid, in.dim, in.exact);
  const double cell = in.grid.cell_area();
  ConvergenceResult result;

  for (double eps : in.epsilons) {
    const QuadratureLevel fine = in.quadrature(eps, false);
    const GridValues g = smooth_on_grid(in, fine, eps);
    if (g.dim != in.dim) fail(ErrorKind::GridMismatch, "field dimension differs from the exact solution");

    ConvergenceRow row;
    row.epsilon = eps;
    row.l1 = lp_error(g, exact, LpNorm::L1, cell);
    row.l2 = lp_error(g, exact, LpNorm::L2, cell);
    row.linf = lp_error(g, exact, LpNorm::Linf, cell);
    row.min_degree = g.min_degree;
    row.apriori_bound = apriori_bound(in, fine, eps, g.min_degree);

    if (in.check_quadrature) {
      const GridValues coarse = smooth_on_grid(in, in.quadrature(eps, true), eps);
      row.quadrature_estimate = lp_error(g, coarse, in.guard_norm, cell);
      const double measured = pick(row, in.guard_norm);
      if (row.quadrature_estimate > 0.5 * measured && row.quadrature_estimate > 1e-10) {
        std::ostringstream os;
        os << "quadrature error estimate " << row.quadrature_estimate << " exceeds half the measured "
           << to_string(in.guard_norm) << " error " << measured << " at epsilon " << eps;
        fail(ErrorKind::QuadratureDominates, os.str());
      }
    }
    result.rows.push_back(row);
  }

  std::vector<double> e, l1, l2, linf;
  for (const auto& r : result.rows) {
    e.push_back(r.epsilon);
    l1.push_back(r.l1);
    l2.push_back(r.l2);
    linf.push_back(r.linf);
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i)
    for (LpNorm p : {LpNorm::L1, LpNorm::L2, LpNorm::Linf}) {
      const double prev = pick(result.rows[i - 1], p), cur = pick(result.rows[i], p);
      if (cur > 1.1 * prev && cur > 1e-12) result.monotone = false;
    }
  if (result.rows.size() >= 2) {
    result.slope_l1 = loglog_slope(e, l1);
    result.slope_l2 = loglog_slope(e, l2);
    result.slope_linf = loglog_slope(e, linf);
  }
  return result;
}

void write_convergence_csv(const std::string& path, const ConvergenceResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "epsilon,l1,l2,linf\n";
  for (const auto& row : r.rows) os << row.epsilon << ',' << row.l1 << ',' << row.l2 << ',' << row.linf << '\n';
  write_file_atomic(path, os.str());
}

}  // namespace ksmooth
