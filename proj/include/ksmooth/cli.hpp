#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ksmooth/toml_lite.hpp"

namespace ksmooth {

struct RunConfig {
  std::string domain;     // domain JSON path
  std::string snapshots;  // snapshot JSONL path
  std::string out = "out";

  std::string kernel = "gaussian";
  double epsilon = 0.0;  // m

  std::string quadrature = "tri";  // tri | mc
  double max_area = 0.0;           // m²
  double min_angle_deg = 20.0;
  std::size_t mc_n = 10'000;

  std::size_t grid = 200;
  std::string op = "markov";  // markov | bistochastic
  double degree_floor = 0.05;

  std::uint64_t seed = 1;
  int threads = 0;  // 0 keeps the OpenMP default

  std::optional<double> rho;  // kg/m³, required by smooth and fields
  bool stress_per_area = false;

  // convergence
  std::vector<double> eps_list;
  std::string field = "step";    // step | constant | linear
  double area_per_eps2 = 0.125;  // working max_area = this × ε² unless max_area is set
  bool check_quadrature = true;

  // thickness
  std::size_t probes = 64;
  std::size_t samples = 100'000;
  std::string fixture;  // "" or interval-nonthick
  int fixture_n = 100;

  // synthesize
  std::size_t count = 200;
  std::string packing = "dense";
};

/// Applies recognised keys; unknown keys raise SchemaError.
void apply_toml(RunConfig& cfg, const TomlTable& table);

/// Canonical JSON of the settings that affect results (not out or threads),
/// used for the manifest hash.
std::string config_json(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Each command writes its outputs and a manifest.json into cfg.out and
/// returns normally on success; failures are thrown as ksmooth::Error.
void cmd_triangulate(const RunConfig& cfg, std::ostream& log);
void cmd_smooth(const RunConfig& cfg, std::ostream& log);
void cmd_fields(const RunConfig& cfg, std::ostream& log);
void cmd_convergence(const RunConfig& cfg, std::ostream& log);
void cmd_thickness(const RunConfig& cfg, std::ostream& log);
void cmd_synthesize(const RunConfig& cfg, std::ostream& log);

/// Exit code for an exception escaping a command: 2 for validation errors,
/// 3 for numeric guards.
int exit_code_for(const std::exception& e);
/// {"error": kind, "message": ...}
std::string error_json(const std::exception& e);

}  // namespace ksmooth
