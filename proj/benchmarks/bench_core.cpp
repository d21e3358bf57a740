#include <benchmark/benchmark.h>

#include <numbers>

#include "hidsym/algebra.hpp"
#include "hidsym/catalog.hpp"
#include "hidsym/geodesic.hpp"
#include "hidsym/killing.hpp"
#include "hidsym/simplify.hpp"
#include "hidsym/spin.hpp"

using namespace hidsym;

namespace {

const CatalogEntry& tn() {
  static const CatalogEntry e = taub_nut(1.0);
  return e;
}

void BM_Simplify(benchmark::State& state) {
  std::set<std::string> c{"r", "theta"};
  Expr e = parse("(4*m + r)/r*sin(theta)^2 + cos(theta)^2*(4*m + r)/r - 4*m/r", c);
  for (auto _ : state) benchmark::DoNotOptimize(simplify(e));
}
BENCHMARK(BM_Simplify);

void BM_ChristoffelTaubNut(benchmark::State& state) {
  for (auto _ : state) {
    // Fresh manifold so the cached symbols are rebuilt each iteration.
    CatalogEntry e = taub_nut(1.0);
    benchmark::DoNotOptimize(e.manifold.christoffel().size());
  }
}
BENCHMARK(BM_ChristoffelTaubNut)->Unit(benchmark::kMillisecond);

void BM_KillingYanoResidual(benchmark::State& state) {
  const auto& e = tn();
  for (auto _ : state) benchmark::DoNotOptimize(ky_residual(e.forms.at("fY"), e.manifold).max_rel);
}
BENCHMARK(BM_KillingYanoResidual)->Unit(benchmark::kMillisecond);

void BM_GeodesicRK4(benchmark::State& state) {
  const auto& M = tn().manifold;
  GeodesicState s0{0, {{"r", 1.25}, {"theta", 2.55}, {"phi", 1.0}, {"chi", 1.0}},
                   {{"r", -0.5}, {"theta", 0.45}, {"phi", -0.5}, {"chi", -0.05}}};
  IntegratorConfig cfg;
  cfg.t1 = static_cast<double>(state.range(0)) * cfg.step;
  cfg.periodic = {{"phi", 2 * std::numbers::pi}, {"chi", 4 * std::numbers::pi}};
  for (auto _ : state) benchmark::DoNotOptimize(integrate(M, s0, cfg).steps);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeodesicRK4)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SpinApply(benchmark::State& state) {
  const auto& e = tn();
  static const SpinGeometry sg(e.manifold, orthonormal_frame(e.manifold, *e.frame), gamma_matrices(4));
  auto bank = spinor_bank(e.manifold, 4, 1, 0);
  OperatorSpec d{OperatorKind::DiracType, e.forms.at("fY")};
  for (auto _ : state) benchmark::DoNotOptimize(sg.apply(d, bank[0]).size());
}
BENCHMARK(BM_SpinApply)->Unit(benchmark::kMillisecond);

void BM_Jacobi(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_check(static_cast<int>(state.range(0))).cases);
}
BENCHMARK(BM_Jacobi)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
