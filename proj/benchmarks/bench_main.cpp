#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "brth/breather.hpp"
#include "brth/evolve.hpp"
#include "brth/field.hpp"
#include "brth/grid.hpp"
#include "brth/params.hpp"
#include "brth/quantize.hpp"
#include "brth/residual.hpp"
#include "brth/special.hpp"

using namespace brth;

namespace {
const PhysicalParams P = natural_units();

BreatherSpec rest_half() {
  BreatherSpec s;
  s.alpha = 0.5;
  return s;
}
}  // namespace

static void BM_SphericalBessel(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spherical_bessel_j(l, x));
    x += 1e-3;
    if (x > 60.0) x = 0.3;
  }
}
BENCHMARK(BM_SphericalBessel)->Arg(0)->Arg(2)->Arg(8);

static void BM_PsiSample(benchmark::State& state) {
  BreatherSpec s;
  s.alpha = 0.5;
  s.mode = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) ? 1 : 0};
  const SolutionSampler sol = make_solution(s, P);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sol.psi({t, {1.3, 0.7, -0.4}}));
    t += 1e-3;
  }
}
BENCHMARK(BM_PsiSample)->Arg(0)->Arg(2);

static void BM_ActionSample(benchmark::State& state) {
  const SolutionSampler sol = make_solution(rest_half(), P);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sol.action({t, {1.3, 0.7, -0.4}}));
    t += 1e-3;
  }
}
BENCHMARK(BM_ActionSample);

static void BM_BoxOperator(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SpacetimeGrid g = build_grid(
      {Axis{"t", 0.0, 1.0, 9}, Axis{"x", -1.0, 1.0, n}, Axis{"y", -1.0, 1.0, n},
       Axis{"z", -1.0, 1.0, n}});
  const ComplexField f = sample(
      [](std::span<const double> c) {
        return std::exp(cplx{0.0, -c[0]}) * std::cos(c[1]) * std::cos(c[2]) * std::cos(c[3]);
      },
      g, Quantity::Psi);
  for (auto _ : state) {
    benchmark::DoNotOptimize(box_operator(f, P));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_BoxOperator)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

static void BM_KgResidualStudy(benchmark::State& state) {
  const std::vector<GridExtent> ext = {{"t", 0.0, 2.0}, {"r", 0.5, 4.5}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kg_residual_study(rest_half(), ext, {0.1, 0.05}, P));
  }
}
BENCHMARK(BM_KgResidualStudy)->Unit(benchmark::kMillisecond);

static void BM_LeapfrogStep(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  const double R = 0.05 * static_cast<double>(cells);
  const SpacetimeGrid g = build_grid({Axis{"r", 0.0, R, cells + 1}});
  EvolveOptions o;
  o.geometry = Geometry::radial_1d;
  o.boundary = Boundary::periodic;
  o.dt = 0.02;
  Evolver ev(init_from_breather(rest_half(), g, P), o, P);
  for (auto _ : state) {
    ev.advance(1);
    benchmark::DoNotOptimize(ev.state().psi.values().data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(cells));
}
BENCHMARK(BM_LeapfrogStep)->Arg(800)->Arg(4200);

static void BM_ShadowEnergy(benchmark::State& state) {
  const SpacetimeGrid g = build_grid({Axis{"r", 0.0, 40.0, 801}});
  EvolveOptions o;
  o.geometry = Geometry::radial_1d;
  o.boundary = Boundary::periodic;
  o.dt = 0.02;
  const Evolver ev(init_from_breather(rest_half(), g, P), o, P);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.shadow_energy());
  }
}
BENCHMARK(BM_ShadowEnergy);

static void BM_DominantFrequency(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ProbeSeries ps;
  ps.times.reserve(n);
  ps.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.1 * static_cast<double>(i);
    ps.times.push_back(t);
    ps.values.push_back(std::exp(cplx{0.0, -t}) + 0.2 * std::exp(cplx{0.0, -2.0 * t}));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(dominant_frequency(ps, 1.0));
  }
  state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(BM_DominantFrequency)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_LoopIntegralQuadrature(benchmark::State& state) {
  const auto well = [](double x) { return 0.5 * x * x; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(loop_integral_quadrature(well, 12.0, P));
  }
}
BENCHMARK(BM_LoopIntegralQuadrature);

BENCHMARK_MAIN();
