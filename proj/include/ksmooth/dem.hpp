#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ksmooth/geometry.hpp"
#include "ksmooth/operators.hpp"
#include "ksmooth/quadrature.hpp"

namespace ksmooth {

struct Contact {
  Point2 z;  // m
  Point2 f;  // N, acting on the floe that lists the contact
};

struct Floe {
  explicit Floe(Polygon p) : polygon(std::move(p)) {}

  Polygon polygon;
  double thickness = 0.0;  // a, m
  Point2 xi;               // centre of mass, m
  Point2 u;                // m/s
  double omega = 0.0;      // rad/s, counter-clockwise positive
  std::vector<Contact> contacts;
};

struct FloeSnapshot {
  double time = 0.0;  // s
  std::vector<Floe> floes;
};

/// Throws InvariantViolation for non-positive thickness or non-finite data.
/// Returns warnings for soft problems: ξ more than 1% of the diameter from
/// the centroid, contacts farther than 10% of the diameter from the boundary,
/// and (with a domain) vertices outside the domain closure.
std::vector<std::string> validate_snapshot(const FloeSnapshot& s, const PolygonalDomain* domain = nullptr);

/// v(y) = u + ω perp(y − ξ), perp(r) = (−r₂, r₁).
Point2 floe_velocity(const Floe& floe, Point2 y);
/// Σ_i (r_i f_iᵀ + f_i r_iᵀ) with r_i = z_i − ξ, as (σ11, σ12, σ22);
/// optionally divided by the floe area.
std::array<double, 3> floe_stress(const Floe& floe, bool per_area = false);

/// One quadrature rule per floe, built in parallel; Monte Carlo seeds are
/// derived from opt.seed and the floe index.
struct FloeRules {
  std::vector<QuadratureRule> rules;
  std::vector<Triangulation> meshes;  // empty for Monte Carlo
};
FloeRules build_floe_rules(const FloeSnapshot& s, const RuleOptions& opt);

/// ρ a per floe, kg/m². Throws InvalidArgument unless ρ > 0.
PiecewiseField mass_density_field(const FloeSnapshot& s, const FloeRules& rules, double rho);
/// Rigid-body velocity at each node, m/s.
PiecewiseField velocity_field(const FloeSnapshot& s, const FloeRules& rules);
/// Constant symmetric stress per floe, N/m (or N/m³ per unit area).
PiecewiseField stress_field(const FloeSnapshot& s, const FloeRules& rules, bool per_area = false);

/// JSON Lines: a units header, then one snapshot per line. Throws SchemaError
/// with line and field context, and for unit tags other than m, s, kg, N.
std::vector<FloeSnapshot> snapshots_from_jsonl(const std::string& text);
std::string snapshots_to_jsonl(const std::vector<FloeSnapshot>& snapshots);
std::vector<FloeSnapshot> load_snapshots(const std::string& path);
void save_snapshots(const std::string& path, const std::vector<FloeSnapshot>& snapshots);

enum class Packing { Dense, Sparse };
Packing parse_packing(const std::string& name);

/// Voronoi cells of seeded random sites, shrunk toward their sites (0.95 for
/// dense, 0.6 for sparse). Neighbouring cells exchange equal and opposite
/// contact forces at shared-edge midpoints; forces are multiples of 2^-10 N
/// so the global sum is exactly zero.
FloeSnapshot synthesize_floes(const PolygonalDomain& domain, std::size_t count, std::uint64_t seed,
                              Packing packing = Packing::Dense);

/// Binary bundle of a PiecewiseField: magic "KSFIELD1", dim, piece count, then
/// per piece the polygon vertices, rule nodes and weights, and node values.
std::string field_to_bytes(const PiecewiseField& f);
PiecewiseField field_from_bytes(const std::string& bytes);

}  // namespace ksmooth
