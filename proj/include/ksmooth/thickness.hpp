#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksmooth/geometry.hpp"

namespace ksmooth {

using Rational = boost::multiprecision::cpp_rational;

/// Open interval (lo, hi).
struct Interval {
  Rational lo;
  Rational hi;
};

/// Finite union of pairwise disjoint open intervals, with exact endpoints.
class IntervalUnionSet {
 public:
  /// Throws InvalidArgument for empty or overlapping intervals.
  explicit IntervalUnionSet(std::vector<Interval> intervals);
  static IntervalUnionSet real_line();

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  bool unbounded() const noexcept { return unbounded_; }
  bool contains(const Rational& x) const;

  /// |(lo, hi) ∩ Ω|.
  Rational measure_within(const Rational& lo, const Rational& hi) const;

 private:
  IntervalUnionSet() = default;
  std::vector<Interval> intervals_;  // sorted by lo
  bool unbounded_ = false;
};

/// Union of (a_n, b_n), n = 1..n_max: each interval is centred in
/// (1/(n+1), 1/n) and covers the fraction r_n = 1/n of it.
IntervalUnionSet nonthick_interval_fixture(int n_max);
Rational nonthick_probe(int n);    // centre of (1/(n+1), 1/n)
Rational nonthick_epsilon(int n);  // 1/(2n(n+1))

/// A(x; r, α, β) = (x−βr, x+βr) ∪ (x−r, x−r+αr) ∪ (x+r−αr, x+r).
std::vector<Interval> punctured_ball(const Rational& x, const Rational& r, const Rational& alpha,
                                     const Rational& beta);
/// Union over j = 1..j_max of A(j²; j, 1/3, 1/(3j)); the balls touch but do not overlap.
IntervalUnionSet doubling_fixture(int j_max);

/// |B_ε(x) ∩ Ω| / |B_ε(x)|, exact in 1-D.
Rational tophat_density(const IntervalUnionSet& set, const Rational& x, const Rational& eps);

struct DensityOptions {
  std::size_t samples = 100'000;
  std::uint64_t seed = 0x5EEDULL;
};

/// 2-D density: exactly 1 when B_ε(x) lies inside Ω, otherwise Monte Carlo
/// over the disc with `samples` points.
double tophat_density(const PolygonalDomain& domain, Point2 x, double eps, const DensityOptions& opt = {});

struct LebesgueEstimate {
  std::vector<double> epsilons;
  std::vector<double> densities;
  double limit = 0.0;        // last value
  bool non_convergent = false;  // last three values spread by more than 0.05
};

LebesgueEstimate lebesgue_density(const PolygonalDomain& domain, Point2 x, const std::vector<double>& eps,
                                  const DensityOptions& opt = {});
LebesgueEstimate lebesgue_density(const IntervalUnionSet& set, const Rational& x, const std::vector<Rational>& eps);

/// μ(B_2r(x) ∩ Ω) / μ(B_r(x) ∩ Ω). Throws EmptyBall when the denominator is 0.
Rational doubling_ratio(const IntervalUnionSet& set, const Rational& x, const Rational& r);
double doubling_ratio(const PolygonalDomain& domain, Point2 x, double r, const DensityOptions& opt = {});

struct ThicknessReport {
  std::vector<double> epsilons;
  std::vector<double> infimum;      // per ε, over probes
  std::vector<std::string> argmin;  // probe achieving the infimum, "x,y" or "x"
  std::size_t probe_count = 0;
  bool thick = false;
  std::optional<double> constant;   // when thick
  std::string verdict;              // "thick with c ≈ ..." or "non-thick trend"
};

struct ScanOptions {
  std::size_t random_probes = 64;
  std::uint64_t seed = 1;
  std::size_t samples = 100'000;
};

/// Probes boundary vertices, edge midpoints, and seeded random interior and
/// on-boundary points, then reports the per-ε infimum of the density.
ThicknessReport thickness_scan(const PolygonalDomain& domain, const std::vector<double>& eps,
                               const ScanOptions& opt = {});
/// A 1-D probe is used only at scales ε ≤ max_eps (when set).
struct Probe1D {
  Rational x;
  std::optional<Rational> max_eps;
};

/// Interval centres, no scale limit.
std::vector<Probe1D> interval_centre_probes(const IntervalUnionSet& set);
/// (x_n, ε_n) for n = 1..n_max: each centre is probed down from its own scale.
std::vector<Probe1D> nonthick_fixture_probes(int n_max);

ThicknessReport thickness_scan(const IntervalUnionSet& set, const std::vector<Rational>& eps,
                               const std::vector<Probe1D>& probes);

/// Applies the verdict rule to a report's per-ε infima: over the smaller-scale
/// half of the list (rounded up, at least two values), a strictly decreasing infimum that
/// ends below half its starting value is a non-thick trend; otherwise the set
/// is reported thick with c the smallest infimum there.
void assign_verdict(ThicknessReport& r);

std::string thickness_report_to_json(const ThicknessReport& r);

}  // namespace ksmooth
