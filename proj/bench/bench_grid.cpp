// Times evaluate_grid_serial against the OpenMP evaluate_grid on a synthetic
// floe snapshot and checks that both produce the same bits.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "ksmooth/dem.hpp"
#include "ksmooth/operators.hpp"

using namespace ksmooth;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t res = argc > 1 ? std::stoul(argv[1]) : 100;
  const double side = 140e3, eps = 1.7e3;
  const PolygonalDomain domain(rectangle_polygon({0, 0}, {side, side}));
  const FloeSnapshot snap = synthesize_floes(domain, 200, 7);

  RuleOptions ro;
  ro.max_area = 0.5e6;
  const FloeRules rules = build_floe_rules(snap, ro);
  const PiecewiseField mass = mass_density_field(snap, rules, 900.0);
  SmoothingContext ctx(domain, build_rule(domain, ro), ScaledKernel(ShapeFunction::gaussian(), eps));
  ctx.node_q();
  const EvaluationGrid grid(domain, res);

  std::printf("grid %zux%zu, %zu domain nodes, %zu field nodes, %d threads\n", res, res, ctx.rule().size(),
              mass.index().size(), omp_get_max_threads());
  for (OperatorKind op : {OperatorKind::Markov, OperatorKind::Bistochastic}) {
    std::optional<GridValues> a, b;
    const double ts = seconds([&] { a.emplace(evaluate_grid_serial(ctx, mass, grid, op)); });
    const double tp = seconds([&] { b.emplace(evaluate_grid(ctx, mass, grid, op)); });
    const bool same = std::memcmp(a->values.data(), b->values.data(), a->values.size() * sizeof(double)) == 0;
    std::printf("%-13s serial %8.3f s  openmp %8.3f s  speedup %5.2fx  identical %s\n", to_string(op), ts, tp,
                ts / tp, same ? "yes" : "NO");
    if (!same) return 1;
  }
  return 0;
}
