#include <omp.h>

#include <CLI11.hpp>
#include <functional>
#include <iostream>

#include "ksmooth/cli.hpp"
#include "ksmooth/common.hpp"

namespace {

using ksmooth::RunConfig;

// Options are parsed into `flags`; after the TOML file (if any) is applied,
// every option that was given on the command line is copied over it.
struct Binder {
  RunConfig flags;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> copies;

  template <class T>
  void add(CLI::App& app, const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* o = app.add_option(name, flags.*field, help);
    copies.emplace_back(o, [this, field](RunConfig& c) { c.*field = flags.*field; });
  }

  void add_rho(CLI::App& app) {
    CLI::Option* o = app.add_option("--rho", rho_, "floe density (kg/m^3)");
    copies.emplace_back(o, [this](RunConfig& c) { c.rho = rho_; });
  }

  void apply(RunConfig& c) const {
    for (const auto& [opt, copy] : copies)
      if (opt->count() > 0) copy(c);
  }

 private:
  double rho_ = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel smoothing of piecewise fields on polygonal domains"};
  app.require_subcommand(1);
  Binder b;
  std::string config_path;
  app.add_option("--config", config_path, "TOML configuration file")->check(CLI::ExistingFile);
  b.add(app, "--seed", &RunConfig::seed, "random seed");
  b.add(app, "--threads", &RunConfig::threads, "OpenMP threads (0 keeps the default)");
  b.add(app, "--out", &RunConfig::out, "output directory");

  auto* tri = app.add_subcommand("triangulate", "mesh a domain and write its quadrature rule");
  auto* smooth = app.add_subcommand("smooth", "smooth mass, velocity and stress fields onto a grid");
  auto* fields = app.add_subcommand("fields", "build piecewise fields from floe snapshots");
  auto* conv = app.add_subcommand("convergence", "convergence study over a list of epsilons");
  auto* thick = app.add_subcommand("thickness", "thickness diagnostics of a domain");
  auto* synth = app.add_subcommand("synthesize", "generate a synthetic floe snapshot");

  for (auto* sc : {tri, smooth, fields, conv, thick, synth}) {
    sc->fallthrough();
    b.add(*sc, "--domain", &RunConfig::domain, "domain JSON");
  }
  for (auto* sc : {tri, smooth, fields, conv}) {
    b.add(*sc, "--max-area", &RunConfig::max_area, "maximum triangle area (m^2)");
    b.add(*sc, "--min-angle", &RunConfig::min_angle_deg, "minimum triangle angle (degrees)");
  }
  for (auto* sc : {smooth, fields, conv}) {
    b.add(*sc, "--quadrature", &RunConfig::quadrature, "tri | mc");
    b.add(*sc, "--mc-n", &RunConfig::mc_n, "Monte Carlo sample count");
  }
  for (auto* sc : {smooth, fields}) {
    b.add(*sc, "--snapshots", &RunConfig::snapshots, "snapshot JSONL");
    b.add_rho(*sc);
    b.add(*sc, "--stress-per-area", &RunConfig::stress_per_area, "divide floe stress by floe area");
  }
  for (auto* sc : {smooth, conv}) {
    b.add(*sc, "--kernel", &RunConfig::kernel, "gaussian | tophat");
    b.add(*sc, "--grid", &RunConfig::grid, "grid resolution per side");
    b.add(*sc, "--operator", &RunConfig::op, "markov | bistochastic");
    b.add(*sc, "--degree-floor", &RunConfig::degree_floor, "minimum admissible degree");
  }
  b.add(*smooth, "--epsilon", &RunConfig::epsilon, "kernel length scale (m)");
  for (auto* sc : {conv, thick}) b.add(*sc, "--eps", &RunConfig::eps_list, "list of length scales (m)");
  b.add(*conv, "--field", &RunConfig::field, "step | constant | linear");
  b.add(*conv, "--area-per-eps2", &RunConfig::area_per_eps2, "max_area as a multiple of eps^2");
  b.add(*conv, "--check-quadrature", &RunConfig::check_quadrature, "raise when quadrature error dominates");
  b.add(*thick, "--probes", &RunConfig::probes, "random probes");
  b.add(*thick, "--samples", &RunConfig::samples, "Monte Carlo samples per density");
  b.add(*thick, "--fixture", &RunConfig::fixture, "interval-nonthick");
  b.add(*thick, "--fixture-n", &RunConfig::fixture_n, "fixture truncation");
  b.add(*synth, "--count", &RunConfig::count, "approximate number of floes");
  b.add(*synth, "--packing", &RunConfig::packing, "dense | sparse");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) ksmooth::apply_toml(cfg, ksmooth::parse_toml(ksmooth::read_file(config_path)));
    b.apply(cfg);
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    if (tri->parsed()) ksmooth::cmd_triangulate(cfg, std::cerr);
    else if (smooth->parsed()) ksmooth::cmd_smooth(cfg, std::cerr);
    else if (fields->parsed()) ksmooth::cmd_fields(cfg, std::cerr);
    else if (conv->parsed()) ksmooth::cmd_convergence(cfg, std::cerr);
    else if (thick->parsed()) ksmooth::cmd_thickness(cfg, std::cerr);
    else ksmooth::cmd_synthesize(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cout << ksmooth::error_json(e) << std::endl;
    return ksmooth::exit_code_for(e);
  }
  return 0;
}
