#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <ostream>

#include "ksmooth/cli.hpp"
#include "ksmooth/dem.hpp"
#include "ksmooth/operators.hpp"
#include "ksmooth/rng.hpp"
#include "ksmooth/thickness.hpp"

namespace ksmooth {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Manifest {
 public:
  Manifest(const RunConfig& cfg, const char* command, const std::vector<std::string>& inputs) : out_(cfg.out) {
    std::uint64_t h = fnv1a64(config_json(cfg));
    for (const auto& path : inputs)
      if (!path.empty()) h = fnv1a64(read_file(path), h);
    j_["command"] = command;
    j_["config"] = json::parse(config_json(cfg));
    j_["config_hash"] = hex64(h);
    j_["files"] = json::array();
    j_["warnings"] = json::array();
  }

  std::string path(const std::string& name) const { return (fs::path(out_) / name).string(); }
  void add_file(const std::string& name) { j_["files"].push_back(name); }
  void warn(const std::string& w) { j_["warnings"].push_back(w); }
  json& operator[](const char* key) { return j_[key]; }

  void write() {
    add_file("manifest.json");
    write_file_atomic(path("manifest.json"), j_.dump(2) + "\n");
  }

 private:
  std::string out_;
  json j_;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void require_file(const std::string& path, const char* what) {
  if (path.empty()) fail(ErrorKind::InvalidArgument, std::string("missing --") + what);
  if (!fs::exists(path)) fail(ErrorKind::InvalidArgument, std::string(what) + " file not found: " + path);
}

PolygonalDomain domain_or_unit_square(const RunConfig& cfg) {
  if (cfg.domain.empty()) return PolygonalDomain(rectangle_polygon({0, 0}, {1, 1}));
  require_file(cfg.domain, "domain");
  return load_domain(cfg.domain);
}

RuleOptions rule_options(const RunConfig& cfg) {
  RuleOptions o;
  o.backend = parse_rule_backend(cfg.quadrature);
  o.max_area = cfg.max_area;
  o.min_angle = cfg.min_angle_deg * kPi / 180.0;
  o.mc_n = cfg.mc_n;
  o.seed = cfg.seed;
  if (o.backend == RuleBackend::Triangulation && !(o.max_area > 0.0))
    fail(ErrorKind::InvalidArgument, "--max-area must be positive for triangulation quadrature");
  if (o.backend == RuleBackend::MonteCarlo && o.mc_n < 1) fail(ErrorKind::InvalidArgument, "--mc-n must be >= 1");
  return o;
}

ScaledKernel make_kernel(const RunConfig& cfg, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "--epsilon must be positive");
  return ScaledKernel(parse_shape_kind(cfg.kernel) == ShapeKind::Gaussian ? ShapeFunction::gaussian()
                                                                           : ShapeFunction::tophat(),
                      eps);
}

void check_finite(const GridValues& g, const std::string& what) {
  for (std::size_t k = 0; k < g.grid.size(); ++k)
    for (std::size_t c = 0; c < g.dim; ++c)
      if (!std::isfinite(g.at(k)[c])) {
        const Point2 p = g.grid.point(k);
        fail(ErrorKind::NonFiniteIntegrand, what + ": non-finite value at (" + std::to_string(p.x) + ", " +
                                                std::to_string(p.y) + ")");
      }
}

std::string snapshot_name(std::size_t k, const char* field, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%04zu_%s.%s", k, field, ext);
  return buf;
}

}  // namespace

void cmd_triangulate(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.domain, "domain");
  const PolygonalDomain domain = load_domain(cfg.domain);
  Manifest m(cfg, "triangulate", {cfg.domain});
  MeshOptions opt;
  opt.max_area = cfg.max_area;
  opt.min_angle = cfg.min_angle_deg * kPi / 180.0;
  MeshStats stats;
  const Triangulation t = triangulate(domain, opt, &stats);
  const QuadratureRule rule = rule_from_triangulation(t);

  write_file_atomic(m.path("mesh.json"), triangulation_to_json(t) + "\n");
  m.add_file("mesh.json");
  save_rule(m.path("rule.bin"), rule);
  m.add_file("rule.bin");

  const double area_sum = t.total_area();
  json s;
  s["triangles"] = t.triangles.size();
  s["vertices"] = stats.vertices;
  s["min_angle_deg"] = t.smallest_angle() * 180.0 / kPi;
  s["max_area"] = t.largest_area();
  s["area_sum"] = area_sum;
  s["relative_area_error"] = std::abs(area_sum - domain.area()) / domain.area();
  m["stats"] = s;
  m.write();
  log << s.dump() << '\n';
}

void cmd_synthesize(const RunConfig& cfg, std::ostream& log) {
  const PolygonalDomain domain = domain_or_unit_square(cfg);
  Manifest m(cfg, "synthesize", {cfg.domain});
  const FloeSnapshot s = synthesize_floes(domain, cfg.count, cfg.seed, parse_packing(cfg.packing));
  save_snapshots(m.path("snapshots.jsonl"), {s});
  m.add_file("snapshots.jsonl");
  double covered = 0.0;
  std::size_t contacts = 0;
  for (const auto& f : s.floes) {
    covered += f.polygon.area();
    contacts += f.contacts.size();
  }
  m["floes"] = s.floes.size();
  m["contacts"] = contacts;
  m["coverage"] = covered / domain.area();
  m.write();
  log << "synthesized " << s.floes.size() << " floes covering " << covered / domain.area() << " of the domain\n";
}

void cmd_fields(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.snapshots, "snapshots");
  if (!cfg.rho) fail(ErrorKind::InvalidArgument, "--rho is required");
  std::optional<PolygonalDomain> domain;
  if (!cfg.domain.empty()) domain = domain_or_unit_square(cfg);
  Manifest m(cfg, "fields", {cfg.domain, cfg.snapshots});
  const auto snaps = load_snapshots(cfg.snapshots);
  const RuleOptions ro = rule_options(cfg);
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    for (const auto& w : validate_snapshot(snaps[k], domain ? &*domain : nullptr))
      m.warn("snapshot " + std::to_string(k) + ": " + w);
    const FloeRules rules = build_floe_rules(snaps[k], ro);
    const std::pair<const char*, PiecewiseField> fields[] = {
        {"mass", mass_density_field(snaps[k], rules, *cfg.rho)},
        {"velocity", velocity_field(snaps[k], rules)},
        {"stress", stress_field(snaps[k], rules, cfg.stress_per_area)}};
    for (const auto& [name, field] : fields) {
      const std::string file = snapshot_name(k, name, "field");
      write_file_atomic(m.path(file), field_to_bytes(field));
      m.add_file(file);
    }
  }
  m["snapshots"] = snaps.size();
  m.write();
  log << "wrote fields for " << snaps.size() << " snapshot(s)\n";
}

void cmd_smooth(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.domain, "domain");
  require_file(cfg.snapshots, "snapshots");
  if (!cfg.rho) fail(ErrorKind::InvalidArgument, "--rho is required");
  if (cfg.grid < 2) fail(ErrorKind::InvalidArgument, "--grid must be at least 2");
  const PolygonalDomain domain = load_domain(cfg.domain);
  Manifest m(cfg, "smooth", {cfg.domain, cfg.snapshots});
  const auto snaps = load_snapshots(cfg.snapshots);
  const OperatorKind op = parse_operator_kind(cfg.op);
  const RuleOptions ro = rule_options(cfg);
  const ScaledKernel kernel = make_kernel(cfg, cfg.epsilon);

  const auto t0 = std::chrono::steady_clock::now();
  Triangulation mesh;
  QuadratureRule rule = build_rule(domain, ro, &mesh);
  const double apriori = ro.backend == RuleBackend::Triangulation && kernel.shape().kind() == ShapeKind::Gaussian
                             ? triangulation_error_bound(mesh, kernel)
                             : std::nan("");
  SmoothingContext ctx(domain, std::move(rule), kernel, cfg.degree_floor);
  const EvaluationGrid grid(domain, cfg.grid);
  log << "domain rule: " << ctx.rule().size() << " nodes; grid " << cfg.grid << "x" << cfg.grid << '\n';

  double min_degree = std::numeric_limits<double>::infinity();
  double mass_residual = 0.0;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    for (const auto& w : validate_snapshot(snaps[k], &domain)) m.warn("snapshot " + std::to_string(k) + ": " + w);
    const FloeRules rules = build_floe_rules(snaps[k], ro);
    const std::pair<const char*, PiecewiseField> fields[] = {
        {"mass", mass_density_field(snaps[k], rules, *cfg.rho)},
        {"velocity", velocity_field(snaps[k], rules)},
        {"stress", stress_field(snaps[k], rules, cfg.stress_per_area)}};
    for (const auto& [name, field] : fields) {
      const GridValues g = evaluate_grid(ctx, field, grid, op);
      min_degree = std::min(min_degree, g.min_degree);
      if (g.failures > 0) {
        const Point2 at = g.failure_locations.front();
        throw DegreeBelowFloorError(at, degree_unchecked(ctx, at), ctx.degree_floor());
      }
      check_finite(g, std::string(name) + " field of snapshot " + std::to_string(k));
      for (const char* ext : {"csv", "bin"}) {
        const std::string file = snapshot_name(k, name, ext);
        if (ext[0] == 'c')
          write_grid_csv(m.path(file), g);
        else
          write_grid_binary(m.path(file), g);
        m.add_file(file);
      }
    }
    if (op == OperatorKind::Bistochastic) {
      const PiecewiseField& mass = fields[0].second;
      const BistochasticPrepared prep = prepare_bistochastic(ctx, mass);
      double smoothed = 0.0, original = 0.0;
      const auto& w = ctx.index().weights();
      for (std::size_t j = 0; j < ctx.index().size(); ++j)
        smoothed += w[j] * bistochastic_smooth(ctx, prep, ctx.index().node(j))[0];
      const auto& fw = mass.index().weights();
      for (std::size_t j = 0; j < fw.size(); ++j) original += fw[j] * mass.values()[j];
      if (original != 0.0) mass_residual = std::max(mass_residual, std::abs(smoothed - original) / std::abs(original));
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m["snapshots"] = snaps.size();
  m["min_degree"] = number_or_null(min_degree);
  m["apriori_bound"] = number_or_null(apriori);
  m["mass_residual"] = op == OperatorKind::Bistochastic ? json(mass_residual) : json(nullptr);
  m["domain_nodes"] = ctx.rule().size();
  m["seconds"] = seconds;
  m.write();
  log << "smoothed " << snaps.size() << " snapshot(s); min degree " << min_degree << "; " << seconds << " s\n";
}

void cmd_convergence(const RunConfig& cfg, std::ostream& log) {
  const PolygonalDomain domain = domain_or_unit_square(cfg);
  Manifest m(cfg, "convergence", {cfg.domain});
  std::vector<double> eps = cfg.eps_list;
  if (eps.empty()) eps = {0.1, 0.05, 0.025, 0.0125};
  const Rect box = bounding_rectangle(domain);
  const double cut = 0.5 * (box.lo.x + box.hi.x);
  const RuleBackend backend = parse_rule_backend(cfg.quadrature);

  std::vector<Polygon> parts;  // parts of the domain; the first carries the step
  std::function<void(Point2, double*)> exact;
  if (cfg.field == "step") {
    if (!domain.holes().empty()) fail(ErrorKind::InvalidArgument, "the step field needs a domain without holes");
    for (std::size_t i = 0; i < domain.outer().size(); ++i)
      if (domain.outer().interior_angle(i) > kPi) fail(ErrorKind::InvalidArgument, "the step field needs a convex domain");
    auto left = clip_convex(domain.outer(), {cut, 0.0}, {1.0, 0.0});
    auto right = clip_convex(domain.outer(), {cut, 0.0}, {-1.0, 0.0});
    if (!left || !right) fail(ErrorKind::InvalidArgument, "domain cannot be split for the step field");
    parts = {*left, *right};
    exact = [cut](Point2 x, double* o) { o[0] = x.x < cut ? 1.0 : 0.0; };
  } else if (cfg.field == "constant") {
    exact = [](Point2, double* o) { o[0] = 1.0; };
  } else if (cfg.field == "linear") {
    const double w = box.width();
    exact = [box, w](Point2 x, double* o) { o[0] = (x.x - box.lo.x) / w; };
  } else {
    fail(ErrorKind::InvalidArgument, "unknown --field '" + cfg.field + "' (expected step|constant|linear)");
  }

  auto level = [&](double e, bool coarse) {
    const double scale = coarse ? 4.0 : 1.0;
    RuleOptions ro;
    ro.backend = backend;
    ro.max_area = scale * (cfg.max_area > 0.0 ? cfg.max_area : cfg.area_per_eps2 * e * e);
    ro.min_angle = cfg.min_angle_deg * kPi / 180.0;
    ro.mc_n = static_cast<std::size_t>(std::max(2.0, double(cfg.mc_n) / scale));
    ro.seed = cfg.seed + (coarse ? 1 : 0);
    QuadratureLevel lv;
    std::vector<FieldPiece> pieces;
    if (parts.empty()) {
      Triangulation t;
      lv.domain_rule = build_rule(domain, ro, &t);
      if (backend == RuleBackend::Triangulation) {
        lv.domain_mesh = t;
        lv.piece_meshes = {t};
      }
      pieces.push_back(sample_piece(domain.outer(), lv.domain_rule, 1, exact));
    } else {
      Triangulation all;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        Triangulation t;
        ro.seed = CounterRng::mix(cfg.seed + (coarse ? 1 : 0) + 7 * i);
        QuadratureRule r = build_rule(PolygonalDomain(parts[i]), ro, &t);
        lv.domain_rule.nodes.insert(lv.domain_rule.nodes.end(), r.nodes.begin(), r.nodes.end());
        lv.domain_rule.weights.insert(lv.domain_rule.weights.end(), r.weights.begin(), r.weights.end());
        all.triangles.insert(all.triangles.end(), t.triangles.begin(), t.triangles.end());
        if (i == 0) {
          const double one = 1.0;
          pieces.push_back(constant_piece(parts[0], std::move(r), std::span<const double>(&one, 1)));
          if (backend == RuleBackend::Triangulation) lv.piece_meshes.push_back(t);
        }
      }
      lv.domain_rule.region_area = domain.area();
      if (backend == RuleBackend::Triangulation) lv.domain_mesh = all;
    }
    lv.field = std::make_shared<const PiecewiseField>(1, std::move(pieces));
    return lv;
  };

  ConvergenceInput in{domain,
                      parse_shape_kind(cfg.kernel) == ShapeKind::Gaussian ? ShapeFunction::gaussian()
                                                                          : ShapeFunction::tophat(),
                      eps,
                      level,
                      exact,
                      1,
                      EvaluationGrid(domain, cfg.grid),
                      parse_operator_kind(cfg.op),
                      LpNorm::L1,
                      cfg.degree_floor,
                      cfg.check_quadrature};
  const ConvergenceResult r = convergence_study(in);

  write_convergence_csv(m.path("convergence.csv"), r);
  m.add_file("convergence.csv");
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"epsilon", row.epsilon},
                    {"l1", row.l1},
                    {"l2", row.l2},
                    {"linf", row.linf},
                    {"quadrature_estimate", row.quadrature_estimate},
                    {"apriori_bound", number_or_null(row.apriori_bound)},
                    {"min_degree", row.min_degree}});
  json summary = {{"rows", rows},
                  {"slope_l1", number_or_null(r.slope_l1)},
                  {"slope_l2", number_or_null(r.slope_l2)},
                  {"slope_linf", number_or_null(r.slope_linf)},
                  {"monotone", r.monotone}};
  write_file_atomic(m.path("convergence.json"), summary.dump(2) + "\n");
  m.add_file("convergence.json");
  double min_degree = std::numeric_limits<double>::infinity();
  for (const auto& row : r.rows) min_degree = std::min(min_degree, row.min_degree);
  m["min_degree"] = number_or_null(min_degree);
  m["slope_l1"] = number_or_null(r.slope_l1);
  m["monotone"] = r.monotone;
  if (!r.monotone) m.warn("errors are not monotone within 10% between consecutive epsilons");
  m.write();
  for (const auto& row : r.rows)
    log << "eps " << row.epsilon << "  l1 " << row.l1 << "  l2 " << row.l2 << "  linf " << row.linf << '\n';
  log << "slopes: l1 " << r.slope_l1 << "  l2 " << r.slope_l2 << "  linf " << r.slope_linf << '\n';
}

void cmd_thickness(const RunConfig& cfg, std::ostream& log) {
  ThicknessReport report;
  std::vector<std::string> inputs;
  if (!cfg.fixture.empty()) {
    if (cfg.fixture != "interval-nonthick")
      fail(ErrorKind::InvalidArgument, "unknown --fixture '" + cfg.fixture + "' (expected interval-nonthick)");
    if (cfg.fixture_n < 1) fail(ErrorKind::InvalidArgument, "--fixture-n must be >= 1");
    std::vector<Rational> eps;
    if (cfg.eps_list.empty()) {
      for (int n : {5, 10, 20, 50, 100, 200, 500, 1000})
        if (n <= cfg.fixture_n) eps.push_back(nonthick_epsilon(n));
    } else {
      for (double e : cfg.eps_list) eps.push_back(Rational(e));
    }
    report = thickness_scan(nonthick_interval_fixture(cfg.fixture_n), eps, nonthick_fixture_probes(cfg.fixture_n));
  } else {
    const PolygonalDomain domain = domain_or_unit_square(cfg);
    inputs.push_back(cfg.domain);
    std::vector<double> eps = cfg.eps_list;
    if (eps.empty()) {
      const Rect box = bounding_rectangle(domain);
      const double s = std::max(box.width(), box.height());
      eps = {0.1 * s, 0.05 * s, 0.02 * s, 0.01 * s};
    }
    report = thickness_scan(domain, eps, ScanOptions{cfg.probes, cfg.seed, cfg.samples});
  }
  Manifest m(cfg, "thickness", inputs);
  write_file_atomic(m.path("thickness.json"), thickness_report_to_json(report) + "\n");
  m.add_file("thickness.json");
  m["verdict"] = report.verdict;
  m.write();
  log << report.verdict << '\n';
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return is_numeric_guard(err->kind()) ? 3 : 2;
  return 2;
}

std::string error_json(const std::exception& e) {
  json j;
  const auto* err = dynamic_cast<const Error*>(&e);
  j["error"] = err ? to_string(err->kind()) : "Error";
  j["message"] = e.what();
  return j.dump();
}

}  // namespace ksmooth
