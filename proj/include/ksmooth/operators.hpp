#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ksmooth/geometry.hpp"
#include "ksmooth/kernels.hpp"
#include "ksmooth/node_index.hpp"
#include "ksmooth/quadrature.hpp"

namespace ksmooth {

/// Domain, its quadrature rule, the kernel, and the degree floor. Degree and
/// q at the domain nodes are computed once on first use.
class SmoothingContext {
 public:
  static constexpr double kDefaultDegreeFloor = 0.05;

  SmoothingContext(PolygonalDomain domain, QuadratureRule domain_rule, ScaledKernel kernel,
                   double degree_floor = kDefaultDegreeFloor);

  const PolygonalDomain& domain() const noexcept { return domain_; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  const ScaledKernel& kernel() const noexcept { return kernel_; }
  double degree_floor() const noexcept { return floor_; }
  const NodeIndex& index() const noexcept { return index_; }

  /// d_ε at the stored (permuted) domain nodes.
  const std::vector<double>& node_degree() const;
  /// q_ε at the stored domain nodes. Throws DegreeBelowFloor if any node
  /// degree is under the floor.
  const std::vector<double>& node_q() const;

 private:
  PolygonalDomain domain_;
  QuadratureRule rule_;
  ScaledKernel kernel_;
  double floor_;
  NodeIndex index_;

  struct Cache {
    std::once_flag degree_once, q_once;
    std::vector<double> degree, q;
  };
  std::unique_ptr<Cache> cache_;
};

struct FieldPiece {
  Polygon polygon;
  QuadratureRule rule;
  std::vector<double> values;  // rule.size() * dim, node-major
};

/// f = Σ_ℓ f_ℓ with each f_ℓ pre-sampled at its piece's quadrature nodes.
/// Overlapping pieces add.
class PiecewiseField {
 public:
  PiecewiseField(std::size_t dim, std::vector<FieldPiece> pieces);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<FieldPiece>& pieces() const noexcept { return pieces_; }

  /// All piece nodes in one index; values() is aligned with its stored order.
  const NodeIndex& index() const noexcept { return index_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Largest |component| over all nodes.
  double sup_norm() const;

 private:
  std::size_t dim_;
  std::vector<FieldPiece> pieces_;
  NodeIndex index_;
  std::vector<double> values_;
};

/// Samples `f` (returning `dim` components) at the nodes of `rule`.
FieldPiece sample_piece(Polygon polygon, QuadratureRule rule, std::size_t dim,
                        const std::function<void(Point2, double*)>& f);
FieldPiece constant_piece(Polygon polygon, QuadratureRule rule, std::span<const double> value);

/// d_{ε,N}(x) = Σ_j w_j k_ε(x, y_j). Throws DegreeBelowFloor under the floor.
double degree(const SmoothingContext& ctx, Point2 x);
double degree_unchecked(const SmoothingContext& ctx, Point2 x);

/// P_ε f(x) = Σ_field w k_ε(x, y) f(y) / d(x), componentwise.
std::vector<double> markov_smooth(const SmoothingContext& ctx, const PiecewiseField& field, Point2 x);

/// q_ε(x) = Σ_j w_j k_ε(x, y_j) / d(y_j) over the domain rule.
double q_function(const SmoothingContext& ctx, Point2 x);

/// Field mapped to the domain nodes by the first three factors of the
/// bistochastic operator: g_j = (K M_{1/d} f)(z_j) / q(z_j).
struct BistochasticPrepared {
  std::size_t dim = 0;
  std::vector<double> g;  // per stored domain node, dim values each
};

BistochasticPrepared prepare_bistochastic(const SmoothingContext& ctx, const PiecewiseField& field,
                                          bool parallel = true);

/// P̃_ε f(x) = (1/d(x)) Σ_j w_j k_ε(x, z_j) g_j.
std::vector<double> bistochastic_smooth(const SmoothingContext& ctx, const BistochasticPrepared& prep,
                                        Point2 x);
std::vector<double> bistochastic_smooth(const SmoothingContext& ctx, const PiecewiseField& field,
                                        Point2 x);

enum class OperatorKind { Markov, Bistochastic };
const char* to_string(OperatorKind op);
OperatorKind parse_operator_kind(const std::string& name);

/// Cell-centre grid over the bounding square of the domain.
class EvaluationGrid {
 public:
  EvaluationGrid(const PolygonalDomain& domain, std::size_t resolution);
  EvaluationGrid(Rect square, std::size_t nx, std::size_t ny, std::vector<std::uint8_t> mask);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return nx_ * ny_; }
  const Rect& extent() const noexcept { return square_; }
  double cell_width() const noexcept { return square_.width() / double(nx_); }
  double cell_height() const noexcept { return square_.height() / double(ny_); }
  double cell_area() const noexcept { return cell_width() * cell_height(); }
  /// Row-major: index = j * nx + i.
  Point2 point(std::size_t index) const;
  bool inside(std::size_t index) const { return mask_[index] != 0; }
  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }
  std::size_t inside_count() const;

 private:
  Rect square_;
  std::size_t nx_, ny_;
  std::vector<std::uint8_t> mask_;
};

inline constexpr double kMaskedSentinel = -9999.0;

struct GridValues {
  GridValues(EvaluationGrid g, std::size_t d)
      : grid(std::move(g)), dim(d), values(grid.size() * d, kMaskedSentinel) {}

  EvaluationGrid grid;
  std::size_t dim = 0;
  std::vector<double> values;  // size * dim, kMaskedSentinel outside the mask
  std::size_t failures = 0;    // points whose degree fell below the floor
  std::vector<Point2> failure_locations;
  double min_degree = 0.0;     // over masked-in points

  const double* at(std::size_t index) const { return values.data() + index * dim; }
};

GridValues evaluate_grid(const SmoothingContext& ctx, const PiecewiseField& field,
                         const EvaluationGrid& grid, OperatorKind op);
/// Single-threaded reference; bitwise identical to evaluate_grid.
GridValues evaluate_grid_serial(const SmoothingContext& ctx, const PiecewiseField& field,
                                const EvaluationGrid& grid, OperatorKind op);

/// Grid of exact values f(x) at masked-in points.
GridValues sample_grid(const EvaluationGrid& grid, std::size_t dim,
                       const std::function<void(Point2, double*)>& f);

enum class LpNorm { L1, L2, Linf };
const char* to_string(LpNorm p);

/// Discrete L^p norm of a − b over masked-in cells, pointwise Euclidean norm
/// across components. Throws GridMismatch unless shapes and masks agree.
double lp_error(const GridValues& a, const GridValues& b, LpNorm p, double cell_area);

void write_grid_csv(const std::string& path, const GridValues& g);
/// magic "KSGRID01", nx, ny, dim (u64), extent (4 doubles), mask bytes, values.
std::string grid_to_bytes(const GridValues& g);
GridValues grid_from_bytes(const std::string& bytes);
void write_grid_binary(const std::string& path, const GridValues& g);

/// Rules and field for one quadrature resolution.
struct QuadratureLevel {
  QuadratureRule domain_rule;
  std::optional<Triangulation> domain_mesh;        // for the a-priori bound
  std::shared_ptr<const PiecewiseField> field;
  std::vector<Triangulation> piece_meshes;         // parallel to field pieces when present
};

struct ConvergenceInput {
  PolygonalDomain domain;
  ShapeFunction shape;
  std::vector<double> epsilons;  // strictly decreasing
  /// Quadrature for a given ε: the working level and a coarser companion used
  /// to estimate the quadrature error a posteriori.
  std::function<QuadratureLevel(double eps, bool coarse)> quadrature;
  std::function<void(Point2, double*)> exact;
  std::size_t dim = 1;
  EvaluationGrid grid;
  OperatorKind op = OperatorKind::Markov;
  LpNorm guard_norm = LpNorm::L1;
  double degree_floor = SmoothingContext::kDefaultDegreeFloor;
  bool check_quadrature = true;
};

struct ConvergenceRow {
  double epsilon = 0.0;
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
  double quadrature_estimate = 0.0;  // guard norm of fine minus coarse smoothing
  double apriori_bound = 0.0;        // NaN when the kernel has no derivative bound
  double min_degree = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double slope_l1 = 0.0, slope_l2 = 0.0, slope_linf = 0.0;
  bool monotone = true;  // each error ≤ 1.1 × the previous one, for every norm
};

/// Throws QuadratureDominates when the quadrature estimate exceeds half the
/// measured error (and an absolute 1e-10 floor) at any ε.
ConvergenceResult convergence_study(const ConvergenceInput& in);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

void write_convergence_csv(const std::string& path, const ConvergenceResult& r);

}  // namespace ksmooth
