#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "ksmooth/rng.hpp"
#include "ksmooth/thickness.hpp"

namespace ksmooth {
namespace {

std::string format_point(Point2 p) {
  std::ostringstream os;
  os.precision(17);
  os << p.x << ',' << p.y;
  return os.str();
}

// Uniform point in the disc of radius `radius` about `c`, from draw `i`.
Point2 disc_sample(const CounterRng& rng, std::uint64_t i, Point2 c, double radius) {
  const double r = radius * std::sqrt(rng.uniform_at(2 * i));
  const double theta = 2.0 * kPi * rng.uniform_at(2 * i + 1);
  return {c.x + r * std::cos(theta), c.y + r * std::sin(theta)};
}

}  // namespace

double tophat_density(const PolygonalDomain& domain, Point2 x, double eps, const DensityOptions& opt) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (domain.contains(x) && domain.distance_to_boundary(x) >= eps) return 1.0;
  if (opt.samples == 0) fail(ErrorKind::InsufficientSamples, "density needs at least one sample");
  const CounterRng rng(opt.seed);
  std::size_t hit = 0;
  for (std::uint64_t i = 0; i < opt.samples; ++i)
    if (domain.contains(disc_sample(rng, i, x, eps))) ++hit;
  return double(hit) / double(opt.samples);
}

LebesgueEstimate lebesgue_density(const PolygonalDomain& domain, Point2 x, const std::vector<double>& eps,
                                  const DensityOptions& opt) {
  LebesgueEstimate out;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (i > 0 && !(eps[i] < eps[i - 1])) fail(ErrorKind::InvalidArgument, "epsilon sequence must be strictly decreasing");
    out.epsilons.push_back(eps[i]);
    out.densities.push_back(tophat_density(domain, x, eps[i], opt));
  }
  if (out.densities.empty()) fail(ErrorKind::InvalidArgument, "epsilon sequence is empty");
  out.limit = out.densities.back();
  if (out.densities.size() >= 3) {
    const auto [lo, hi] = std::minmax_element(out.densities.end() - 3, out.densities.end());
    out.non_convergent = *hi - *lo > 0.05;
  }
  return out;
}

double doubling_ratio(const PolygonalDomain& domain, Point2 x, double r, const DensityOptions& opt) {
  if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "radius must be positive");
  const CounterRng rng(opt.seed);
  std::size_t outer = 0, inner = 0;
  for (std::uint64_t i = 0; i < opt.samples; ++i) {
    const Point2 p = disc_sample(rng, i, x, 2.0 * r);
    if (!domain.contains(p)) continue;
    ++outer;
    if (norm2(p - x) < r * r) ++inner;
  }
  if (inner == 0) fail(ErrorKind::EmptyBall, "no samples of B_r(x) landed in the domain");
  return double(outer) / double(inner);
}

ThicknessReport thickness_scan(const PolygonalDomain& domain, const std::vector<double>& eps, const ScanOptions& opt) {
  std::vector<Point2> probes = domain.boundary_vertices();
  const auto edges = domain.boundary_edges();
  for (const auto& e : edges) probes.push_back((e[0] + e[1]) * 0.5);

  const CounterRng rng(opt.seed, 1);
  const Rect box = bounding_rectangle(domain);
  std::uint64_t draw = 0;
  for (std::size_t found = 0; found < opt.random_probes && draw < 1'000'000;) {
    const Point2 p{box.lo.x + box.width() * rng.uniform_at(draw), box.lo.y + box.height() * rng.uniform_at(draw + 1)};
    draw += 2;
    if (domain.contains(p)) {
      probes.push_back(p);
      ++found;
    }
  }
  for (std::size_t i = 0; i < opt.random_probes; ++i) {
    const auto& e = edges[rng.bits_at(draw++) % edges.size()];
    const double t = rng.uniform_at(draw++);
    probes.push_back(e[0] + (e[1] - e[0]) * t);
  }

  ThicknessReport r;
  r.probe_count = probes.size();
  const DensityOptions dopt{opt.samples, opt.seed};
  for (double e : eps) {
    std::vector<double> d(probes.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < probes.size(); ++i) d[i] = tophat_density(domain, probes[i], e, dopt);
    const auto it = std::min_element(d.begin(), d.end());
    r.epsilons.push_back(e);
    r.infimum.push_back(*it);
    r.argmin.push_back(format_point(probes[static_cast<std::size_t>(it - d.begin())]));
  }
  assign_verdict(r);
  return r;
}

void assign_verdict(ThicknessReport& r) {
  r.thick = false;
  r.constant.reset();
  const std::size_t n = r.infimum.size();
  if (n == 0) {
    r.verdict = "no data";
    return;
  }
  const std::size_t tail = std::min(n, std::max<std::size_t>(2, (n + 1) / 2));
  const auto first = r.infimum.end() - static_cast<std::ptrdiff_t>(tail);
  bool decreasing = tail >= 2;
  for (auto it = first + 1; it != r.infimum.end(); ++it)
    if (!(*it < *(it - 1))) decreasing = false;
  if (decreasing && *first > 0.0 && r.infimum.back() / *first < 0.5) {
    r.verdict = "non-thick trend";
    return;
  }
  const double c = *std::min_element(first, r.infimum.end());
  r.thick = c > 0.0;
  if (!r.thick) {
    r.verdict = "non-thick trend";
    return;
  }
  r.constant = c;
  std::ostringstream os;
  os.precision(4);
  os << "thick with c ≈ " << c;
  r.verdict = os.str();
}

std::string thickness_report_to_json(const ThicknessReport& r) {
  nlohmann::json j;
  j["epsilons"] = r.epsilons;
  j["infimum"] = r.infimum;
  j["argmin"] = r.argmin;
  j["probe_count"] = r.probe_count;
  j["thick"] = r.thick;
  j["constant"] = r.constant ? nlohmann::json(*r.constant) : nlohmann::json(nullptr);
  j["verdict"] = r.verdict;
  return j.dump(2);
}

}  // namespace ksmooth
