#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "ksmooth/operators.hpp"
#include "support.hpp"

using namespace ksmooth;
using test::kind_of;

namespace {

PolygonalDomain unit_square() { return PolygonalDomain(rectangle_polygon({0, 0}, {1, 1})); }

QuadratureRule square_rule(double max_area) { return rule_from_triangulation(triangulate(unit_square(), max_area)); }

PiecewiseField constant_field(const PolygonalDomain& d, const QuadratureRule& r, double c) {
  std::vector<FieldPiece> pieces;
  pieces.push_back(constant_piece(d.outer(), r, std::span<const double>(&c, 1)));
  return PiecewiseField(1, std::move(pieces));
}

PiecewiseField bump_field(const QuadratureRule& r) {
  std::vector<FieldPiece> pieces;
  pieces.push_back(sample_piece(rectangle_polygon({0, 0}, {1, 1}), r, 2, [](Point2 p, double* o) {
    o[0] = std::sin(3 * p.x) * p.y;
    o[1] = p.x < 0.4 ? 1.0 : -2.0;
  }));
  return PiecewiseField(2, std::move(pieces));
}

double brute_degree(const QuadratureRule& r, const ScaledKernel& k, Point2 x) {
  double s = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) s += r.weights[j] * k(x, r.nodes[j]);
  return s;
}

}  // namespace

TEST_CASE("node index finds exactly the nodes within a radius") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  std::vector<Point2> nodes(3000);
  for (auto& p : nodes) p = {u(gen), 0.3 * u(gen)};
  const NodeIndex idx(nodes, std::vector<double>(nodes.size(), 1.0));
  REQUIRE(idx.size() == nodes.size());
  for (int q = 0; q < 50; ++q) {
    const Point2 c{u(gen), u(gen)};
    const double rad = 0.05 + 0.02 * q;
    std::vector<std::uint32_t> got;
    idx.for_each_within(c, rad, [&](std::uint32_t k, double r2) {
      CHECK(r2 == doctest::Approx(norm2(idx.node(k) - c)));
      got.push_back(idx.order()[k]);
    });
    std::vector<std::uint32_t> want;
    for (std::uint32_t i = 0; i < nodes.size(); ++i)
      if (norm2(nodes[i] - c) <= rad * rad) want.push_back(i);
    std::sort(got.begin(), got.end());
    CHECK(got == want);
  }
  std::vector<double> values(2 * nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) values[2 * i] = values[2 * i + 1] = double(i);
  const auto perm = idx.permute(values, 2);
  for (std::size_t k = 0; k < idx.size(); ++k) CHECK(perm[2 * k + 1] == double(idx.order()[k]));
}

TEST_CASE("degree matches a direct sum and the density limits of the square") {
  const QuadratureRule r = square_rule(2e-4);
  const ScaledKernel k(ShapeFunction::gaussian(), 0.05);
  const SmoothingContext ctx(unit_square(), r, k);
  for (Point2 x : {Point2{0.5, 0.5}, Point2{0.01, 0.3}, Point2{0.999, 0.999}})
    CHECK(degree(ctx, x) == doctest::Approx(brute_degree(r, k, x)).epsilon(1e-12));
  CHECK(degree(ctx, {0.5, 0.5}) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(degree_unchecked(ctx, {0.5, 0.0}) == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(degree_unchecked(ctx, {1.0, 1.0}) == doctest::Approx(0.25).epsilon(1e-2));
}

TEST_CASE("degree floor violations carry the location") {
  const SmoothingContext ctx(unit_square(), square_rule(1e-2), ScaledKernel(ShapeFunction::gaussian(), 0.05), 0.3);
  try {
    degree(ctx, {1.0, 1.0});
    FAIL("expected DegreeBelowFloor");
  } catch (const DegreeBelowFloorError& e) {
    CHECK(e.kind() == ErrorKind::DegreeBelowFloor);
    CHECK(e.where() == Point2{1.0, 1.0});
    CHECK(e.degree() < 0.3);
  }
}

TEST_CASE("context validation") {
  const auto g = ScaledKernel(ShapeFunction::gaussian(), 0.1);
  CHECK(kind_of([&] { SmoothingContext(unit_square(), square_rule(0.1), g, 1.5); }) == ErrorKind::InvalidArgument);
  QuadratureRule outside = square_rule(0.1);
  outside.nodes[0] = {2.0, 2.0};
  CHECK(kind_of([&] { SmoothingContext(unit_square(), outside, g); }) == ErrorKind::InvariantViolation);
  QuadratureRule negative = square_rule(0.1);
  negative.weights[0] = -1.0;
  CHECK(kind_of([&] { SmoothingContext(unit_square(), negative, g); }) == ErrorKind::InvariantViolation);
}

TEST_CASE("Markov smoothing preserves constants exactly") {
  const auto d = unit_square();
  const QuadratureRule r = square_rule(1e-3);
  for (const auto& shape : {ShapeFunction::gaussian(), ShapeFunction::tophat()}) {
    const SmoothingContext ctx(d, r, ScaledKernel(shape, 0.1));
    const auto f = constant_field(d, r, 3.5);
    const GridValues g = evaluate_grid(ctx, f, EvaluationGrid(d, 40), OperatorKind::Markov);
    CHECK(g.failures == 0);
    for (std::size_t p = 0; p < g.grid.size(); ++p)
      if (g.grid.inside(p)) CHECK(std::abs(g.at(p)[0] - 3.5) <= 1e-12);
  }
}

TEST_CASE("Markov smoothing is a weighted average") {
  const auto d = unit_square();
  const QuadratureRule r = square_rule(2e-3);
  const SmoothingContext ctx(d, r, ScaledKernel(ShapeFunction::gaussian(), 0.08));
  const auto f = bump_field(r);
  const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  for (Point2 x : {Point2{0.2, 0.2}, Point2{0.41, 0.9}, Point2{0.99, 0.01}}) {
    const auto v = markov_smooth(ctx, f, x);
    CHECK(v.size() == 2);
    for (double c : v) {
      CHECK(c >= *lo - 1e-12);
      CHECK(c <= *hi + 1e-12);
    }
    // direct evaluation
    double s0 = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j)
      s0 += r.weights[j] * ctx.kernel()(x, r.nodes[j]) * std::sin(3 * r.nodes[j].x) * r.nodes[j].y;
    CHECK(v[0] == doctest::Approx(s0 / brute_degree(r, ctx.kernel(), x)).epsilon(1e-10));
  }
}

TEST_CASE("bistochastic smoothing maps 1 to 1 and preserves discrete mass") {
  const auto d = unit_square();
  const QuadratureRule r = square_rule(2e-3);
  const SmoothingContext ctx(d, r, ScaledKernel(ShapeFunction::gaussian(), 0.07));
  const auto one = constant_field(d, r, 1.0);
  for (Point2 x : {Point2{0.5, 0.5}, Point2{0.01, 0.02}, Point2{0.7, 0.99}})
    CHECK(bistochastic_smooth(ctx, one, x)[0] == doctest::Approx(1.0).epsilon(1e-12));

  const auto f = bump_field(r);
  const auto prep = prepare_bistochastic(ctx, f);
  const NodeIndex& idx = ctx.index();
  double in0 = 0, in1 = 0, out0 = 0, out1 = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto v = bistochastic_smooth(ctx, prep, idx.node(j));
    out0 += idx.weights()[j] * v[0];
    out1 += idx.weights()[j] * v[1];
  }
  for (std::size_t j = 0; j < f.index().size(); ++j) {
    in0 += f.index().weights()[j] * f.values()[2 * j];
    in1 += f.index().weights()[j] * f.values()[2 * j + 1];
  }
  CHECK(out0 == doctest::Approx(in0).epsilon(1e-12));
  CHECK(out1 == doctest::Approx(in1).epsilon(1e-12));
}

TEST_CASE("q function is the degree-normalized kernel mass") {
  const auto d = unit_square();
  const QuadratureRule r = square_rule(5e-3);
  const SmoothingContext ctx(d, r, ScaledKernel(ShapeFunction::gaussian(), 0.1));
  const Point2 x{0.3, 0.6};
  double s = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j)
    s += r.weights[j] * ctx.kernel()(x, r.nodes[j]) / brute_degree(r, ctx.kernel(), r.nodes[j]);
  CHECK(q_function(ctx, x) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("parallel and serial grids agree bit for bit") {
  const auto d = unit_square();
  const QuadratureRule r = square_rule(2e-3);
  const SmoothingContext ctx(d, r, ScaledKernel(ShapeFunction::gaussian(), 0.05));
  const auto f = bump_field(r);
  const EvaluationGrid grid(d, 37);
  for (OperatorKind op : {OperatorKind::Markov, OperatorKind::Bistochastic}) {
    const GridValues a = evaluate_grid(ctx, f, grid, op);
    const GridValues b = evaluate_grid_serial(ctx, f, grid, op);
    REQUIRE(a.values.size() == b.values.size());
    CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
    CHECK(a.min_degree == b.min_degree);
  }
}

TEST_CASE("grid masking, sentinel and failures") {
  const PolygonalDomain L(Polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}));
  const QuadratureRule r = rule_from_triangulation(triangulate(L, 0.01));
  const SmoothingContext ctx(L, r, ScaledKernel(ShapeFunction::gaussian(), 0.1));
  const auto f = constant_field(L, r, 1.0);
  const EvaluationGrid grid(L, 20);
  CHECK(grid.inside_count() == 300);
  const GridValues g = evaluate_grid(ctx, f, grid, OperatorKind::Markov);
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (!grid.inside(p)) CHECK(g.at(p)[0] == kMaskedSentinel);
  CHECK(g.failures == 0);
  CHECK(g.min_degree > 0.2);

  const SmoothingContext strict(L, r, ScaledKernel(ShapeFunction::gaussian(), 0.1), 0.5);
  const GridValues h = evaluate_grid(strict, f, grid, OperatorKind::Markov);
  CHECK(h.failures > 0);
  CHECK(h.failure_locations.size() == h.failures);
  CHECK(h.min_degree < 0.5);
}

TEST_CASE("Lp error against hand computed values") {
  const EvaluationGrid grid(Rect{{0, 0}, {1, 1}}, 2, 2, {1, 1, 1, 0});
  GridValues a(grid, 1), b(grid, 1);
  a.values = {1, 2, 3, kMaskedSentinel};
  b.values = {1, 0, 6, kMaskedSentinel};
  const double cell = grid.cell_area();
  CHECK(lp_error(a, b, LpNorm::L1, cell) == doctest::Approx(5 * 0.25));
  CHECK(lp_error(a, b, LpNorm::L2, cell) == doctest::Approx(std::sqrt(13 * 0.25)));
  CHECK(lp_error(a, b, LpNorm::Linf, cell) == doctest::Approx(3.0));
  const EvaluationGrid other(Rect{{0, 0}, {1, 1}}, 2, 2, {1, 1, 1, 1});
  GridValues c(other, 1);
  CHECK(kind_of([&] { lp_error(a, c, LpNorm::L1, cell); }) == ErrorKind::GridMismatch);
}

TEST_CASE("grid files round trip") {
  const auto d = unit_square();
  const QuadratureRule r = square_rule(1e-2);
  const SmoothingContext ctx(d, r, ScaledKernel(ShapeFunction::gaussian(), 0.2));
  const GridValues g = evaluate_grid(ctx, bump_field(r), EvaluationGrid(d, 9), OperatorKind::Markov);
  const GridValues back = grid_from_bytes(grid_to_bytes(g));
  CHECK(back.values == g.values);
  CHECK(back.grid.nx() == 9);
  CHECK(back.dim == 2);

  const auto dir = std::filesystem::temp_directory_path() / "ksmooth_grid_test";
  write_grid_csv((dir / "g.csv").string(), g);
  const std::string csv = read_file((dir / "g.csv").string());
  CHECK(csv.rfind("x,y,inside,v_1,v_2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 82);
  std::filesystem::remove_all(dir);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1, 2, 4, 8}, y{3, 12, 48, 192};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
  CHECK(std::isnan(loglog_slope(x, std::vector<double>{1, 0, 1, 1})));
}

TEST_CASE("convergence study of a constant field") {
  const auto d = unit_square();
  ConvergenceInput in{d,
                      ShapeFunction::gaussian(),
                      {0.2, 0.1},
                      [&](double eps, bool coarse) {
                        QuadratureLevel lv;
                        Triangulation t = triangulate(d, (coarse ? 4 : 1) * eps * eps / 4);
                        lv.domain_rule = rule_from_triangulation(t);
                        lv.domain_mesh = t;
                        lv.piece_meshes = {t};
                        lv.field = std::make_shared<PiecewiseField>(constant_field(d, lv.domain_rule, 1.0));
                        return lv;
                      },
                      [](Point2, double* o) { o[0] = 1.0; },
                      1,
                      EvaluationGrid(d, 30)};
  const ConvergenceResult r = convergence_study(in);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.l1 < 1e-9);
    CHECK(row.linf < 1e-9);
    CHECK(row.apriori_bound > 0.0);
    CHECK(row.min_degree > 0.2);
  }
}

TEST_CASE("convergence study raises when quadrature dominates") {
  const auto d = unit_square();
  ConvergenceInput in{d,
                      ShapeFunction::gaussian(),
                      {0.1, 0.05},
                      [&](double, bool coarse) {
                        QuadratureLevel lv;
                        lv.domain_rule = rule_monte_carlo(d, coarse ? 200 : 400, coarse ? 1 : 2);
                        std::vector<FieldPiece> p;
                        p.push_back(sample_piece(d.outer(), lv.domain_rule, 1,
                                                 [](Point2 x, double* o) { o[0] = x.x; }));
                        lv.field = std::make_shared<PiecewiseField>(1, std::move(p));
                        return lv;
                      },
                      [](Point2 x, double* o) { o[0] = x.x; },
                      1,
                      EvaluationGrid(d, 20),
                      OperatorKind::Markov,
                      LpNorm::L1,
                      0.01};
  CHECK(kind_of([&] { convergence_study(in); }) == ErrorKind::QuadratureDominates);
  in.check_quadrature = false;
  const auto r = convergence_study(in);
  CHECK(std::isnan(r.rows[0].apriori_bound));
}
