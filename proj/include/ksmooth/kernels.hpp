#pragma once

#include <string>

#include "ksmooth/common.hpp"

namespace ksmooth {

enum class ShapeKind { Gaussian, Tophat };

const char* to_string(ShapeKind kind);
ShapeKind parse_shape_kind(const std::string& name);  // "gaussian" | "tophat"

/// Which of the shape-function axioms a profile satisfies.
struct AxiomFlags {
  bool nonnegative = false;        // K1
  bool radial = false;             // K2
  bool normalized = false;         // K3, ∫h = 1
  bool radially_decreasing = false;  // K4
  bool continuous = false;         // K5
  bool strictly_positive = false;  // K6

  bool smoothing_axioms() const { return nonnegative && radial && normalized && radially_decreasing; }
};

/// Radial profile h on R^n (n = 1 or 2).
///
/// Construction verifies ∫h = 1 to 1e-6 by radial Gauss-Kronrod quadrature
/// and sets the K3 flag from the result.
class ShapeFunction {
 public:
  static ShapeFunction gaussian(int dimension = 2);
  static ShapeFunction tophat(int dimension = 2);

  ShapeKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dim_; }
  const AxiomFlags& axioms() const noexcept { return flags_; }

  /// h as a function of the radius ‖x‖.
  double radial(double r) const;
  double operator()(Point2 x) const { return radial(norm(x)); }
  double operator()(double x) const { return radial(std::abs(x)); }

  /// Numerically computed ∫_{R^n} h.
  double total_mass() const;

 private:
  ShapeFunction(ShapeKind kind, int dim);

  ShapeKind kind_;
  int dim_;
  AxiomFlags flags_;
};

/// h_ε(x) = ε^{-n} h(x/ε), truncated beyond `truncation_radius()`
/// (8ε for the Gaussian, ε for the tophat).
class ScaledKernel {
 public:
  ScaledKernel(ShapeFunction shape, double epsilon);

  const ShapeFunction& shape() const noexcept { return shape_; }
  double epsilon() const noexcept { return epsilon_; }
  double truncation_radius() const noexcept { return radius_; }
  double truncation_radius_sq() const noexcept { return radius_sq_; }

  /// h_ε as a function of squared distance; 0 beyond the truncation radius.
  double from_distance_sq(double r2) const {
    if (r2 > radius_sq_) return 0.0;
    if (gaussian_) return peak_ * std::exp(-r2 * inv_two_eps_sq_);
    return r2 < radius_sq_ ? peak_ : 0.0;
  }

  /// k_ε(x, y) = h_ε(y - x).
  double operator()(Point2 x, Point2 y) const { return from_distance_sq(norm2(y - x)); }

  /// Mass of h_ε outside the truncation radius.
  double truncated_mass() const;

 private:
  ShapeFunction shape_;
  double epsilon_;
  double radius_;
  double radius_sq_;
  double peak_;
  double inv_two_eps_sq_;
  bool gaussian_;
};

/// sup_r |d/dr h_ε(r)| for the Gaussian, ε^{-n-1} (2π)^{-n/2} e^{-1/2}.
/// Throws UnsupportedShape for the tophat.
double radial_derivative_sup(const ScaledKernel& kernel);

}  // namespace ksmooth
