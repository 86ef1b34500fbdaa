#include <algorithm>
#include <sstream>

#include "ksmooth/thickness.hpp"

namespace ksmooth {
namespace {

std::string format_rational(const Rational& x) {
  std::ostringstream os;
  os.precision(17);
  os << static_cast<double>(x);
  return os.str();
}

}  // namespace

IntervalUnionSet::IntervalUnionSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  std::sort(intervals_.begin(), intervals_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (!(intervals_[i].lo < intervals_[i].hi)) fail(ErrorKind::InvalidArgument, "interval is empty");
    if (i > 0 && intervals_[i].lo < intervals_[i - 1].hi) fail(ErrorKind::InvalidArgument, "intervals overlap");
  }
}

IntervalUnionSet IntervalUnionSet::real_line() {
  IntervalUnionSet s;
  s.unbounded_ = true;
  return s;
}

bool IntervalUnionSet::contains(const Rational& x) const {
  if (unbounded_) return true;
  for (const auto& iv : intervals_)
    if (iv.lo < x && x < iv.hi) return true;
  return false;
}

Rational IntervalUnionSet::measure_within(const Rational& lo, const Rational& hi) const {
  if (!(lo < hi)) return Rational(0);
  if (unbounded_) return hi - lo;
  Rational total = 0;
  for (const auto& iv : intervals_) {
    if (iv.lo >= hi) break;
    const Rational a = std::max(lo, iv.lo), b = std::min(hi, iv.hi);
    if (a < b) total += b - a;
  }
  return total;
}

Rational nonthick_probe(int n) { return (Rational(1, n) + Rational(1, n + 1)) / 2; }

Rational nonthick_epsilon(int n) { return Rational(1, 2 * n * (n + 1)); }

IntervalUnionSet nonthick_interval_fixture(int n_max) {
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "fixture needs n_max >= 1");
  std::vector<Interval> iv;
  for (int n = 1; n <= n_max; ++n) {
    const Rational half = Rational(1, n) * (Rational(1, n) - Rational(1, n + 1)) / 2;
    const Rational c = nonthick_probe(n);
    iv.push_back({c - half, c + half});
  }
  return IntervalUnionSet(std::move(iv));
}

std::vector<Interval> punctured_ball(const Rational& x, const Rational& r, const Rational& alpha,
                                     const Rational& beta) {
  if (!(r > 0) || !(alpha > 0) || !(beta > 0) || !(alpha + beta < 1))
    fail(ErrorKind::InvalidArgument, "punctured ball needs r > 0 and α, β > 0 with α + β < 1");
  return {{x - beta * r, x + beta * r}, {x - r, x - r + alpha * r}, {x + r - alpha * r, x + r}};
}

IntervalUnionSet doubling_fixture(int j_max) {
  std::vector<Interval> iv;
  for (int j = 1; j <= j_max; ++j) {
    auto a = punctured_ball(Rational(j * j), Rational(j), Rational(1, 3), Rational(1, 3 * j));
    iv.insert(iv.end(), a.begin(), a.end());
  }
  return IntervalUnionSet(std::move(iv));
}

Rational tophat_density(const IntervalUnionSet& set, const Rational& x, const Rational& eps) {
  if (!(eps > 0)) fail(ErrorKind::InvalidArgument, "epsilon must be positive");
  return set.measure_within(x - eps, x + eps) / (2 * eps);
}

LebesgueEstimate lebesgue_density(const IntervalUnionSet& set, const Rational& x, const std::vector<Rational>& eps) {
  LebesgueEstimate out;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (i > 0 && !(eps[i] < eps[i - 1])) fail(ErrorKind::InvalidArgument, "epsilon sequence must be strictly decreasing");
    out.epsilons.push_back(static_cast<double>(eps[i]));
    out.densities.push_back(static_cast<double>(tophat_density(set, x, eps[i])));
  }
  if (out.densities.empty()) fail(ErrorKind::InvalidArgument, "epsilon sequence is empty");
  out.limit = out.densities.back();
  if (out.densities.size() >= 3) {
    const auto tail = out.densities.end() - 3;
    const auto [lo, hi] = std::minmax_element(tail, out.densities.end());
    out.non_convergent = *hi - *lo > 0.05;
  }
  return out;
}

Rational doubling_ratio(const IntervalUnionSet& set, const Rational& x, const Rational& r) {
  if (!(r > 0)) fail(ErrorKind::InvalidArgument, "radius must be positive");
  const Rational inner = set.measure_within(x - r, x + r);
  if (inner == 0) fail(ErrorKind::EmptyBall, "ball B_r(x) does not meet the set");
  return set.measure_within(x - 2 * r, x + 2 * r) / inner;
}

std::vector<Probe1D> interval_centre_probes(const IntervalUnionSet& set) {
  std::vector<Probe1D> out;
  for (const auto& iv : set.intervals()) out.push_back({(iv.lo + iv.hi) / 2, std::nullopt});
  return out;
}

std::vector<Probe1D> nonthick_fixture_probes(int n_max) {
  std::vector<Probe1D> out;
  for (int n = 1; n <= n_max; ++n) out.push_back({nonthick_probe(n), nonthick_epsilon(n)});
  return out;
}

ThicknessReport thickness_scan(const IntervalUnionSet& set, const std::vector<Rational>& eps,
                               const std::vector<Probe1D>& probes) {
  if (probes.empty()) fail(ErrorKind::InvalidArgument, "no probes");
  ThicknessReport r;
  r.probe_count = probes.size();
  for (const auto& e : eps) {
    std::optional<Rational> best;
    Rational at;
    for (const auto& p : probes) {
      if (p.max_eps && e > *p.max_eps) continue;
      const Rational d = tophat_density(set, p.x, e);
      if (!best || d < *best) {
        best = d;
        at = p.x;
      }
    }
    if (!best) continue;
    r.epsilons.push_back(static_cast<double>(e));
    r.infimum.push_back(static_cast<double>(*best));
    r.argmin.push_back(format_rational(at));
  }
  assign_verdict(r);
  return r;
}

}  // namespace ksmooth
