#include "ksmooth/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace ksmooth {
namespace {

double unit_ball_volume(int dim) { return dim == 1 ? 2.0 : kPi; }

// Surface measure of the unit sphere: 2 for n = 1, 2π for n = 2.
double sphere_area(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

}  // namespace

const char* to_string(ShapeKind kind) { return kind == ShapeKind::Gaussian ? "gaussian" : "tophat"; }

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "gaussian") return ShapeKind::Gaussian;
  if (name == "tophat") return ShapeKind::Tophat;
  fail(ErrorKind::InvalidArgument, "unknown kernel '" + name + "' (expected gaussian|tophat)");
}

ShapeFunction::ShapeFunction(ShapeKind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim != 1 && dim != 2) fail(ErrorKind::InvalidArgument, "shape dimension must be 1 or 2");
  flags_.nonnegative = true;
  flags_.radial = true;
  flags_.radially_decreasing = true;
  flags_.continuous = kind == ShapeKind::Gaussian;
  flags_.strictly_positive = kind == ShapeKind::Gaussian;
  flags_.normalized = std::abs(total_mass() - 1.0) <= 1e-6;
  if (!flags_.normalized) fail(ErrorKind::InvariantViolation, "shape function is not normalized");
}

ShapeFunction ShapeFunction::gaussian(int dimension) { return {ShapeKind::Gaussian, dimension}; }
ShapeFunction ShapeFunction::tophat(int dimension) { return {ShapeKind::Tophat, dimension}; }

double ShapeFunction::radial(double r) const {
  if (kind_ == ShapeKind::Gaussian) return std::pow(2.0 * kPi, -0.5 * dim_) * std::exp(-0.5 * r * r);
  return r < 1.0 ? 1.0 / unit_ball_volume(dim_) : 0.0;
}

double ShapeFunction::total_mass() const {
  using boost::math::quadrature::gauss_kronrod;
  auto shell = [this](double r) { return sphere_area(dim_) * std::pow(r, dim_ - 1) * radial(r); };
  if (kind_ == ShapeKind::Tophat) return gauss_kronrod<double, 15>::integrate(shell, 0.0, 1.0);
  return gauss_kronrod<double, 61>::integrate(shell, 0.0, std::numeric_limits<double>::infinity(), 15,
                                              1e-12);
}

ScaledKernel::ScaledKernel(ShapeFunction shape, double epsilon)
    : shape_(shape), epsilon_(epsilon), gaussian_(shape.kind() == ShapeKind::Gaussian) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    fail(ErrorKind::InvalidArgument, "epsilon must be positive");
  radius_ = gaussian_ ? 8.0 * epsilon : epsilon;
  radius_sq_ = radius_ * radius_;
  peak_ = std::pow(epsilon, -shape.dimension()) * shape.radial(0.0);
  inv_two_eps_sq_ = 1.0 / (2.0 * epsilon * epsilon);
}

double ScaledKernel::truncated_mass() const {
  if (!gaussian_) return 0.0;
  const double s = radius_ / epsilon_;
  // Tail of the radial Gaussian: P(|X| > s).
  if (shape_.dimension() == 2) return std::exp(-0.5 * s * s);
  return std::erfc(s / std::sqrt(2.0));
}

double radial_derivative_sup(const ScaledKernel& kernel) {
  if (kernel.shape().kind() != ShapeKind::Gaussian)
    fail(ErrorKind::UnsupportedShape, "radial derivative bound needs a differentiable shape");
  const int n = kernel.shape().dimension();
  const double eps = kernel.epsilon();
  // |h_ε'(r)| = (r/ε²) h_ε(r) peaks at r = ε.
  return std::pow(eps, -n - 1) * std::pow(2.0 * kPi, -0.5 * n) * std::exp(-0.5);
}

}  // namespace ksmooth
