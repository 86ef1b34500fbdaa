#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "ksmooth/cli.hpp"
#include "ksmooth/dem.hpp"
#include "ksmooth/operators.hpp"
#include "support.hpp"

using namespace ksmooth;
using test::kind_of;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ksmooth_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

int run_cli(const std::string& args, const std::string& stdout_path) {
  const std::string cmd = std::string(KSMOOTH_CLI_PATH) + " " + args + " > " + stdout_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const std::string& path) { return json::parse(read_file(path)); }

}  // namespace

TEST_CASE("TOML reader") {
  const auto t = parse_toml(R"(
# comment
domain = "d.json"   # trailing
epsilon = 1.7e3
grid = 200
flag = true
eps = [0.1, 0.05, 1]
[mesh]
max_area = 5e5
)");
  CHECK(t.at("domain").as_string("domain") == "d.json");
  CHECK(t.at("epsilon").as_double("epsilon") == 1700.0);
  CHECK(t.at("grid").as_int("grid") == 200);
  CHECK(t.at("flag").as_bool("flag"));
  CHECK(t.at("eps").as_double_list("eps") == std::vector<double>{0.1, 0.05, 1.0});
  CHECK(t.at("mesh.max_area").as_double("mesh.max_area") == 5e5);
  CHECK(kind_of([] { parse_toml("a = 1\na = 2\n"); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { parse_toml("a = \"open\n"); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { parse_toml("a = 1 2\n"); }) == ErrorKind::SchemaError);
  CHECK(kind_of([&] { t.at("domain").as_double("domain"); }) == ErrorKind::SchemaError);
}

TEST_CASE("config from TOML") {
  RunConfig c;
  apply_toml(c, parse_toml("epsilon = 1700\noperator = \"bistochastic\"\nrho = 900\neps = [0.2, 0.1]\n"));
  CHECK(c.epsilon == 1700.0);
  CHECK(c.op == "bistochastic");
  CHECK(*c.rho == 900.0);
  CHECK(c.eps_list.size() == 2);
  CHECK(kind_of([&] { apply_toml(c, parse_toml("epsilonn = 3\n")); }) == ErrorKind::SchemaError);

  RunConfig a, b;
  b.out = "elsewhere";
  b.threads = 4;
  CHECK(fnv1a64(config_json(a)) == fnv1a64(config_json(b)));
  b.seed = 2;
  CHECK(fnv1a64(config_json(a)) != fnv1a64(config_json(b)));
}

TEST_CASE("exit codes and error JSON") {
  CHECK(exit_code_for(Error(ErrorKind::SchemaError, "x")) == 2);
  CHECK(exit_code_for(Error(ErrorKind::InvalidRegion, "x")) == 2);
  CHECK(exit_code_for(DegreeBelowFloorError({1, 2}, 0.01, 0.05)) == 3);
  CHECK(exit_code_for(Error(ErrorKind::NonFiniteIntegrand, "x")) == 3);
  const auto j = json::parse(error_json(Error(ErrorKind::EmptyBall, "msg")));
  CHECK(j["error"] == "EmptyBall");
  CHECK(j["message"] == "msg");
}

TEST_CASE("triangulate command is deterministic") {
  TempDir dir("cli_tri");
  save_domain(dir / "square.json", PolygonalDomain(rectangle_polygon({0, 0}, {140e3, 140e3})));
  RunConfig c;
  c.domain = dir / "square.json";
  c.max_area = 8e6;
  c.out = dir / "a";
  std::ostringstream log;
  cmd_triangulate(c, log);
  c.out = dir / "b";
  cmd_triangulate(c, log);
  CHECK(read_file(dir / "a/mesh.json") == read_file(dir / "b/mesh.json"));
  CHECK(read_file(dir / "a/rule.bin") == read_file(dir / "b/rule.bin"));
  const json m = read_json(dir / "a/manifest.json");
  CHECK(m["stats"]["triangles"].get<std::size_t>() >= 140 * 140 / 8);
  CHECK(m["stats"]["relative_area_error"].get<double>() < 1e-12);
  CHECK(m["stats"]["min_angle_deg"].get<double>() >= 20.0 - 1e-9);
  CHECK(m["config_hash"] == read_json(dir / "b/manifest.json")["config_hash"]);
  CHECK(load_rule(dir / "a/rule.bin").size() == m["stats"]["triangles"].get<std::size_t>());
}

TEST_CASE("smooth command on a single constant floe") {
  TempDir dir("cli_smooth");
  const PolygonalDomain d(rectangle_polygon({0, 0}, {10, 10}));
  save_domain(dir / "d.json", d);
  FloeSnapshot s;
  Floe f(d.outer());
  f.thickness = 2.0;
  f.xi = {5, 5};
  s.floes.push_back(f);
  save_snapshots(dir / "s.jsonl", {s});

  for (const char* op : {"markov", "bistochastic"}) {
    RunConfig c;
    c.domain = dir / "d.json";
    c.snapshots = dir / "s.jsonl";
    c.rho = 900.0;
    c.epsilon = 1.0;
    c.max_area = 0.1;
    c.grid = 20;
    c.op = op;
    c.out = dir / op;
    std::ostringstream log;
    cmd_smooth(c, log);
    const GridValues mass = grid_from_bytes(read_file(dir / (std::string(op) + "/snapshot_0000_mass.bin")));
    for (std::size_t p = 0; p < mass.grid.size(); ++p)
      if (mass.grid.inside(p)) CHECK(mass.at(p)[0] == doctest::Approx(1800.0).epsilon(1e-12));
    const json m = read_json(dir / (std::string(op) + "/manifest.json"));
    CHECK(m["min_degree"].get<double>() >= 0.05);
    CHECK(m["apriori_bound"].get<double>() > 0.0);
    CHECK(m["files"].size() == 7);
    if (std::string(op) == "bistochastic") CHECK(m["mass_residual"].get<double>() < 1e-12);
    else CHECK(m["mass_residual"].is_null());
  }

  RunConfig c;
  c.domain = dir / "d.json";
  c.snapshots = dir / "s.jsonl";
  c.epsilon = 1.0;
  c.max_area = 0.1;
  std::ostringstream log;
  CHECK(kind_of([&] { cmd_smooth(c, log); }) == ErrorKind::InvalidArgument);  // no rho
}

TEST_CASE("convergence command") {
  TempDir dir("cli_conv");
  RunConfig c;
  c.field = "constant";
  c.eps_list = {0.2, 0.1};
  c.grid = 30;
  c.out = dir / "const";
  std::ostringstream log;
  cmd_convergence(c, log);
  const json j = read_json(dir / "const/convergence.json");
  for (const auto& row : j["rows"]) CHECK(row["l1"].get<double>() < 1e-9);

  c.field = "step";
  c.out = dir / "step";
  cmd_convergence(c, log);
  const json s = read_json(dir / "step/convergence.json");
  CHECK(s["rows"][1]["l1"].get<double>() < s["rows"][0]["l1"].get<double>());
  CHECK(read_file(dir / "step/convergence.csv").rfind("epsilon,l1,l2,linf\n", 0) == 0);

  c.field = "linear";
  c.quadrature = "mc";
  c.mc_n = 1000;
  c.out = dir / "mc";
  CHECK(kind_of([&] { cmd_convergence(c, log); }) == ErrorKind::QuadratureDominates);
}

TEST_CASE("thickness command") {
  TempDir dir("cli_thick");
  RunConfig c;
  c.fixture = "interval-nonthick";
  c.out = dir / "fixture";
  std::ostringstream log;
  cmd_thickness(c, log);
  CHECK(read_json(dir / "fixture/thickness.json")["verdict"] == "non-thick trend");

  RunConfig sq;
  sq.probes = 8;
  sq.samples = 20000;
  sq.out = dir / "square";
  cmd_thickness(sq, log);
  const json r = read_json(dir / "square/thickness.json");
  CHECK(r["thick"] == true);
  CHECK(r["constant"].get<double>() == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("command-line front end") {
  TempDir dir("cli_exe");
  save_domain(dir / "d.json", PolygonalDomain(rectangle_polygon({0, 0}, {1, 1})));
  CHECK(run_cli("--out " + (dir / "t") + " triangulate --domain " + (dir / "d.json") + " --max-area 0.01",
                dir / "stdout.txt") == 0);
  CHECK(fs::exists(dir / "t/mesh.json"));

  // config file, with a flag overriding it
  write_file_atomic(dir / "c.toml", "max_area = 0.5\nmin_angle = 25\n");
  CHECK(run_cli("--config " + (dir / "c.toml") + " --out " + (dir / "u") + " triangulate --domain " +
                    (dir / "d.json") + " --max-area 0.02",
                dir / "stdout.txt") == 0);
  const json m = read_json(dir / "u/manifest.json");
  CHECK(m["config"]["max_area"] == 0.02);
  CHECK(m["config"]["min_angle"] == 25.0);

  // validation error: exit 2 and a JSON error on stdout
  CHECK(run_cli("--out " + (dir / "v") + " triangulate --domain " + (dir / "missing.json") + " --max-area 0.01",
                dir / "stdout.txt") == 2);
  CHECK(read_json(dir / "stdout.txt")["error"] == "InvalidArgument");

  // numeric guard: with a high floor the degree near the corners is too small
  FloeSnapshot s;
  Floe f(rectangle_polygon({0.2, 0.2}, {0.6, 0.6}));
  f.thickness = 1.0;
  f.xi = f.polygon.centroid();
  s.floes.push_back(f);
  save_snapshots(dir / "s.jsonl", {s});
  CHECK(run_cli("--out " + (dir / "w") + " smooth --domain " + (dir / "d.json") + " --snapshots " +
                    (dir / "s.jsonl") + " --rho 900 --epsilon 0.2 --max-area 1e-3 --grid 10 --degree-floor 0.5",
                dir / "stdout.txt") == 3);
  CHECK(read_json(dir / "stdout.txt")["error"] == "DegreeBelowFloor");
}
