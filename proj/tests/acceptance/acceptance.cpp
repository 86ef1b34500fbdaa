// Acceptance suite: one PASS/FAIL line per criterion, each checked at its
// stated tolerance and runtime budget. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <sstream>
#include <string>

#include "ksmooth/cli.hpp"
#include "ksmooth/dem.hpp"
#include "ksmooth/operators.hpp"
#include "ksmooth/thickness.hpp"

using namespace ksmooth;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s <= budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s  %2d  %-36s %s; %.2f s (budget %.0f s)\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), s,
              budget_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

const PolygonalDomain kSquare(rectangle_polygon({0, 0}, {1, 1}));

PiecewiseField single_constant(const Polygon& p, QuadratureRule r, double c) {
  std::vector<FieldPiece> pieces;
  pieces.push_back(constant_piece(p, std::move(r), std::span<const double>(&c, 1)));
  return PiecewiseField(1, std::move(pieces));
}

Outcome constant_preservation() {
  const QuadratureRule r = rule_from_triangulation(triangulate(kSquare, 1e-3));
  const SmoothingContext ctx(kSquare, r, ScaledKernel(ShapeFunction::gaussian(), 0.1));
  const GridValues g = evaluate_grid(ctx, single_constant(kSquare.outer(), r, 1.0), EvaluationGrid(kSquare, 100),
                                     OperatorKind::Markov);
  double worst = 0.0;
  for (std::size_t p = 0; p < g.grid.size(); ++p)
    if (g.grid.inside(p)) worst = std::max(worst, std::abs(g.at(p)[0] - 1.0));
  return {worst <= 1e-12 && g.failures == 0, fmt("max |P1 - 1| = %.2e over %zu points", worst, g.grid.inside_count())};
}

Outcome bistochastic_mass() {
  const double eps = 0.05, max_area = 1e-4;
  const Polygon sub = rectangle_polygon({0.25, 0.25}, {0.75, 0.75});
  const QuadratureRule dom = rule_from_triangulation(triangulate(kSquare, max_area));
  const QuadratureRule piece = rule_from_triangulation(triangulate(PolygonalDomain(sub), max_area));
  const SmoothingContext ctx(kSquare, dom, ScaledKernel(ShapeFunction::gaussian(), eps));
  const PiecewiseField f = single_constant(sub, piece, 1.0);
  const BistochasticPrepared prep = prepare_bistochastic(ctx, f);
  const NodeIndex& idx = ctx.index();
  std::vector<double> v(idx.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::size_t j = 0; j < idx.size(); ++j) v[j] = bistochastic_smooth(ctx, prep, idx.node(j))[0];
  double mass = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) mass += idx.weights()[j] * v[j];
  const double exact = 0.25;
  const double rel = std::abs(mass - exact) / exact;
  return {rel <= 1e-3, fmt("|int P~f - int f| / int f = %.2e (%zu domain nodes)", rel, idx.size())};
}

Outcome degree_limits() {
  const double eps = 0.005;
  const std::array<Point2, 3> probes{Point2{0.5, 0.5}, Point2{0.5, 0.0}, Point2{0.0, 0.0}};
  const std::array<double, 3> expect{1.0, 0.5, 0.25};
  MeshOptions opt;
  opt.max_area = 1e-2;
  // fine within 10ε of each probe, graded towards the coarse size elsewhere
  opt.local_max_area = [&](Point2 p) {
    double dist = 1.0;
    for (Point2 q : probes) dist = std::min(dist, norm(p - q));
    const double fine = eps * eps / 40;
    return dist < 10 * eps ? fine : std::max(fine, 0.02 * dist * dist);
  };
  const QuadratureRule r = rule_from_triangulation(triangulate(kSquare, opt));
  const SmoothingContext ctx(kSquare, r, ScaledKernel(ShapeFunction::gaussian(), eps));
  double worst = 0.0;
  std::string vals;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double d = degree_unchecked(ctx, probes[i]);
    worst = std::max(worst, std::abs(d - expect[i]));
    vals += fmt("%s%.5f", i ? "/" : "", d);
  }
  return {worst <= 1e-2,
          "degree interior/edge/corner = " + vals + fmt(", max deviation %.1e (%zu nodes)", worst, r.size())};
}

Outcome triangle_thickness() {
  const double theta = kPi / 6;
  const PolygonalDomain tri(Polygon({{0, 0}, {1, 0}, {1, std::tan(theta)}}));
  const ThicknessReport r = thickness_scan(tri, {0.1, 0.05, 0.02, 0.01});
  const double target = theta / (2 * kPi) - 1e-2;
  const double c = r.constant ? *r.constant : 0.0;
  return {r.thick && c >= target, fmt("c = %.4f >= %.4f (%s)", c, target, r.verdict.c_str())};
}

Outcome nonthick_fixture() {
  const IntervalUnionSet s = nonthick_interval_fixture(100);
  double worst = 0.0;
  bool exact = true;
  for (int n : {5, 10, 50}) {
    const Rational d = tophat_density(s, nonthick_probe(n), nonthick_epsilon(n));
    exact = exact && d == Rational(1, n);
    worst = std::max(worst, std::abs(static_cast<double>(d) - 1.0 / n));
  }
  return {exact && worst <= 1e-15, fmt("density = 1/n exactly for n = 5, 10, 50 (max |diff| %.1e)", worst)};
}

Outcome doubling_counterexample() {
  const IntervalUnionSet s = doubling_fixture(10);
  std::string vals;
  bool ok = true;
  for (int j : {1, 3, 10}) {
    const Rational q = doubling_ratio(s, Rational(j * j), Rational(j, 2));
    ok = ok && q == Rational(1 + j);
    vals += fmt("%s%s", vals.empty() ? "" : ", ", q.str().c_str());
  }
  return {ok, "ratios for j = 1, 3, 10: " + vals};
}

Outcome quadrature_bound() {
  const double eps = 0.05;
  const ScaledKernel k(ShapeFunction::gaussian(), eps);
  const Polygon left = rectangle_polygon({0, 0}, {0.5, 1}), right = rectangle_polygon({0.5, 0}, {1, 1});
  const std::array<double, 2> value{1.0, -2.5};
  const std::array<Point2, 3> xs{Point2{0.5, 0.5}, Point2{0.47, 0.03}, Point2{0.8, 0.61}};

  // I(x) = Σ_ℓ c_ℓ ∫_{S_ℓ} h_ε(y − x) dy, with the error of the whole rule bounded by Σ |c_ℓ| B(T_ℓ)
  auto integrals = [&](double max_area, double* bound, std::size_t* nodes) {
    std::array<double, 3> I{};
    *bound = 0.0;
    *nodes = 0;
    for (int l = 0; l < 2; ++l) {
      const Triangulation t = triangulate(PolygonalDomain(l == 0 ? left : right), max_area);
      const QuadratureRule r = rule_from_triangulation(t);
      *bound += std::abs(value[l]) * triangulation_error_bound(t, k);
      *nodes += r.size();
      for (std::size_t i = 0; i < xs.size(); ++i) I[i] += value[l] * integrate(r, [&](Point2 y) { return k(xs[i], y); });
    }
    return I;
  };
  auto closed_form = [&](Point2 x) {
    const double gy = Phi((1 - x.y) / eps) - Phi(-x.y / eps);
    return gy * (value[0] * (Phi((0.5 - x.x) / eps) - Phi(-x.x / eps)) +
                 value[1] * (Phi((1 - x.x) / eps) - Phi((0.5 - x.x) / eps)));
  };

  const std::vector<double> levels{4e-3, 1e-3, 2.5e-4, 6.25e-5};
  double ref_bound;
  std::size_t ref_nodes;
  const auto ref = integrals(levels.back() / 100, &ref_bound, &ref_nodes);
  double ref_vs_closed = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) ref_vs_closed = std::max(ref_vs_closed, std::abs(ref[i] - closed_form(xs[i])));

  std::vector<double> n, err;
  bool sound = true;
  std::string detail;
  for (double a : levels) {
    double b;
    std::size_t nodes;
    const auto I = integrals(a, &b, &nodes);
    double e = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) e = std::max(e, std::abs(I[i] - ref[i]));
    sound = sound && e <= b;
    n.push_back(double(nodes));
    err.push_back(e);
    detail += fmt("%sN=%zu err %.1e <= %.1e", detail.empty() ? "" : ", ", nodes, e, b);
  }
  const double slope = loglog_slope(n, err);
  // the reference itself must be far more accurate than the errors it measures
  const bool ref_ok = ref_vs_closed <= 0.1 * *std::min_element(err.begin(), err.end());
  return {sound && slope <= -0.5 && ref_ok,
          detail + fmt("; slope %.2f; reference N=%zu vs closed form %.1e", slope, ref_nodes, ref_vs_closed)};
}

Outcome monte_carlo_calibration() {
  const auto half = [](Point2 p) { return p.x < 0.5 ? 1.0 : 0.0; };
  double ss = 0.0, est = 0.0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    const QuadratureRule r = rule_monte_carlo(kSquare, 10000, 1000 + s);
    const double e = integrate(r, half) - 0.5;
    ss += e * e;
    est += monte_carlo_error_estimate(r, half);
  }
  const double rms = std::sqrt(ss / seeds);
  est /= seeds;
  const double ratio = rms / est;
  return {ratio >= 1.0 / 3.0 && ratio <= 3.0, fmt("RMS %.4f vs estimate %.4f (ratio %.2f)", rms, est, ratio)};
}

Outcome smoothing_convergence() {
  const Polygon left = rectangle_polygon({0, 0}, {0.5, 1}), right = rectangle_polygon({0.5, 0}, {1, 1});
  auto level = [&](double eps, bool coarse) {
    const double max_area = (coarse ? 4.0 : 1.0) * eps * eps / 8;
    QuadratureLevel lv;
    Triangulation all;
    for (const Polygon& p : {left, right}) {
      Triangulation t = triangulate(PolygonalDomain(p), max_area);
      QuadratureRule r = rule_from_triangulation(t);
      lv.domain_rule.nodes.insert(lv.domain_rule.nodes.end(), r.nodes.begin(), r.nodes.end());
      lv.domain_rule.weights.insert(lv.domain_rule.weights.end(), r.weights.begin(), r.weights.end());
      all.triangles.insert(all.triangles.end(), t.triangles.begin(), t.triangles.end());
      if (lv.piece_meshes.empty()) {
        lv.field = std::make_shared<PiecewiseField>(single_constant(p, r, 1.0));
        lv.piece_meshes.push_back(t);
      }
    }
    lv.domain_mesh = all;
    return lv;
  };
  const EvaluationGrid grid(kSquare, 200);
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  const ConvergenceInput in{kSquare, ShapeFunction::gaussian(), eps, level,
                            [](Point2 x, double* o) { o[0] = x.x < 0.5 ? 1.0 : 0.0; }, 1, grid};
  const ConvergenceResult r = convergence_study(in);

  // closed-form P_ε f on the square: the y factors cancel
  double worst_rel = 0.0;
  std::vector<double> oracle_err;
  const GridValues step = sample_grid(grid, 1, in.exact);
  for (double e : eps) {
    const GridValues oracle = sample_grid(grid, 1, [e](Point2 x, double* o) {
      const double a = Phi(-x.x / e);
      o[0] = (Phi((0.5 - x.x) / e) - a) / (Phi((1 - x.x) / e) - a);
    });
    const QuadratureLevel lv = level(e, false);
    const SmoothingContext ctx(kSquare, lv.domain_rule, ScaledKernel(ShapeFunction::gaussian(), e));
    const GridValues g = evaluate_grid(ctx, *lv.field, grid, OperatorKind::Markov);
    const double oe = lp_error(oracle, step, LpNorm::L1, grid.cell_area());
    oracle_err.push_back(oe);
    worst_rel = std::max(worst_rel, lp_error(g, oracle, LpNorm::L1, grid.cell_area()) / oe);
  }
  const double oracle_slope = loglog_slope(eps, oracle_err);

  std::string errs;
  for (const auto& row : r.rows) errs += fmt("%s%.4f", errs.empty() ? "" : "/", row.l1);
  bool decreasing = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i) decreasing = decreasing && r.rows[i].l1 < r.rows[i - 1].l1;
  const bool ok = decreasing && std::abs(r.slope_l1 - 1.0) <= 0.3 && std::abs(oracle_slope - 1.0) <= 0.3 &&
                  worst_rel <= 0.1;
  return {ok, "L1 errors " + errs +
                  fmt("; slope %.3f (oracle %.3f); max |P - oracle| / |oracle - f| = %.3f", r.slope_l1,
                      oracle_slope, worst_rel)};
}

Outcome dem_oracles() {
  const PolygonalDomain big(rectangle_polygon({0, 0}, {140e3, 140e3}));
  FloeSnapshot s = synthesize_floes(big, 40, 5);
  RuleOptions ro;
  ro.max_area = 2e7;
  const FloeRules rules = build_floe_rules(s, ro);
  const PiecewiseField v = velocity_field(s, rules);
  double vel_err = 0.0;
  for (std::size_t l = 0; l < s.floes.size(); ++l) {
    const Floe& f = s.floes[l];
    const FieldPiece& p = v.pieces()[l];
    for (std::size_t j = 0; j < p.rule.size(); ++j) {
      const Point2 r = p.rule.nodes[j] - f.xi;
      vel_err = std::max({vel_err, std::abs(p.values[2 * j] - (f.u.x - f.omega * r.y)),
                          std::abs(p.values[2 * j + 1] - (f.u.y + f.omega * r.x))});
    }
  }

  Floe one(rectangle_polygon({-1, -1}, {1, 1}));
  one.thickness = 1.0;
  one.contacts = {{{0, 1}, {1, 0}}};
  const auto sigma = floe_stress(one);
  const double stress_err = std::max({std::abs(sigma[0]), std::abs(sigma[1] - 1.0), std::abs(sigma[2])});

  double worst_sum = 0.0;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const FloeSnapshot syn = synthesize_floes(big, 200, seed);
    double fx = 0.0, fy = 0.0;
    for (const auto& f : syn.floes)
      for (const auto& c : f.contacts) {
        fx += c.f.x;
        fy += c.f.y;
      }
    worst_sum = std::max(worst_sum, std::hypot(fx, fy));
  }
  return {vel_err <= 1e-12 && stress_err == 0.0 && worst_sum <= 1e-9,
          fmt("velocity err %.1e, stress err %.1e, |sum of contact forces| %.1e N", vel_err, stress_err, worst_sum)};
}

Outcome end_to_end() {
  const fs::path dir = fs::temp_directory_path() / "ksmooth_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_domain((dir / "domain.json").string(), PolygonalDomain(rectangle_polygon({0, 0}, {140e3, 140e3})));

  std::ostringstream log;
  RunConfig syn;
  syn.domain = (dir / "domain.json").string();
  syn.count = 200;
  syn.seed = 2024;
  syn.out = (dir / "synth").string();
  cmd_synthesize(syn, log);

  RunConfig c;
  c.domain = syn.domain;
  c.snapshots = (dir / "synth/snapshots.jsonl").string();
  c.rho = 900.0;
  c.epsilon = 1.7e3;
  c.max_area = 0.5e6;
  c.grid = 200;
  c.out = (dir / "smooth").string();
  cmd_smooth(c, log);

  const auto m = nlohmann::json::parse(read_file((dir / "smooth/manifest.json").string()));
  bool finite = true;
  std::size_t values = 0;
  for (const char* field : {"mass", "velocity", "stress"}) {
    const GridValues g = grid_from_bytes(read_file((dir / fmt("smooth/snapshot_0000_%s.bin", field)).string()));
    for (double x : g.values) finite = finite && std::isfinite(x);
    values += g.values.size();
  }
  const double min_degree = m["min_degree"].get<double>();
  const std::size_t floes = nlohmann::json::parse(read_file((dir / "synth/manifest.json").string()))["floes"];
  fs::remove_all(dir);
  return {finite && min_degree >= 0.05 && m["files"].size() == 7,
          fmt("%zu floes, %zu grid values finite: %s, min degree %.4f, manifest with %zu files", floes, values,
              finite ? "yes" : "no", min_degree, m["files"].size())};
}

}  // namespace

int main() {
  criterion(1, "constant preservation", 1, constant_preservation);
  criterion(2, "bistochastic mass preservation", 30, bistochastic_mass);
  criterion(3, "degree density limits", 5, degree_limits);
  criterion(4, "triangle thickness bound", 10, triangle_thickness);
  criterion(5, "non-thick detection", 5, nonthick_fixture);
  criterion(6, "doubling counterexample", 5, doubling_counterexample);
  criterion(7, "quadrature bound soundness and rate", 120, quadrature_bound);
  criterion(8, "Monte Carlo calibration", 60, monte_carlo_calibration);
  criterion(9, "smoothing convergence", 180, smoothing_convergence);
  criterion(10, "DEM field oracles", 5, dem_oracles);
  criterion(11, "end-to-end smoke", 600, end_to_end);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
