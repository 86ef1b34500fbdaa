#include <json.hpp>

#include "ksmooth/cli.hpp"
#include "ksmooth/common.hpp"

namespace ksmooth {

void apply_toml(RunConfig& cfg, const TomlTable& table) {
  for (const auto& [key, v] : table) {
    if (key == "domain") cfg.domain = v.as_string(key);
    else if (key == "snapshots") cfg.snapshots = v.as_string(key);
    else if (key == "out") cfg.out = v.as_string(key);
    else if (key == "kernel") cfg.kernel = v.as_string(key);
    else if (key == "epsilon") cfg.epsilon = v.as_double(key);
    else if (key == "quadrature") cfg.quadrature = v.as_string(key);
    else if (key == "max_area") cfg.max_area = v.as_double(key);
    else if (key == "min_angle") cfg.min_angle_deg = v.as_double(key);
    else if (key == "mc_n") cfg.mc_n = static_cast<std::size_t>(v.as_int(key));
    else if (key == "grid") cfg.grid = static_cast<std::size_t>(v.as_int(key));
    else if (key == "operator") cfg.op = v.as_string(key);
    else if (key == "degree_floor") cfg.degree_floor = v.as_double(key);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(v.as_int(key));
    else if (key == "threads") cfg.threads = static_cast<int>(v.as_int(key));
    else if (key == "rho") cfg.rho = v.as_double(key);
    else if (key == "stress_per_area") cfg.stress_per_area = v.as_bool(key);
    else if (key == "eps") cfg.eps_list = v.as_double_list(key);
    else if (key == "field") cfg.field = v.as_string(key);
    else if (key == "area_per_eps2") cfg.area_per_eps2 = v.as_double(key);
    else if (key == "check_quadrature") cfg.check_quadrature = v.as_bool(key);
    else if (key == "probes") cfg.probes = static_cast<std::size_t>(v.as_int(key));
    else if (key == "samples") cfg.samples = static_cast<std::size_t>(v.as_int(key));
    else if (key == "fixture") cfg.fixture = v.as_string(key);
    else if (key == "fixture_n") cfg.fixture_n = static_cast<int>(v.as_int(key));
    else if (key == "count") cfg.count = static_cast<std::size_t>(v.as_int(key));
    else if (key == "packing") cfg.packing = v.as_string(key);
    else fail(ErrorKind::SchemaError, "unknown config key '" + key + "'");
  }
}

std::string config_json(const RunConfig& c) {
  nlohmann::json j;
  j["domain"] = c.domain;
  j["snapshots"] = c.snapshots;
  j["kernel"] = c.kernel;
  j["epsilon"] = c.epsilon;
  j["quadrature"] = c.quadrature;
  j["max_area"] = c.max_area;
  j["min_angle"] = c.min_angle_deg;
  j["mc_n"] = c.mc_n;
  j["grid"] = c.grid;
  j["operator"] = c.op;
  j["degree_floor"] = c.degree_floor;
  j["seed"] = c.seed;
  j["rho"] = c.rho ? nlohmann::json(*c.rho) : nlohmann::json(nullptr);
  j["stress_per_area"] = c.stress_per_area;
  j["eps"] = c.eps_list;
  j["field"] = c.field;
  j["area_per_eps2"] = c.area_per_eps2;
  j["check_quadrature"] = c.check_quadrature;
  j["probes"] = c.probes;
  j["samples"] = c.samples;
  j["fixture"] = c.fixture;
  j["fixture_n"] = c.fixture_n;
  j["count"] = c.count;
  j["packing"] = c.packing;
  return j.dump();
}

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ksmooth
