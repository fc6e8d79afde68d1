// Serial reference against OpenMP kernels. The parallel variants carry an
// if(n >= 2048) clause, so small sizes measure the serial path plus the check.

#include <benchmark/benchmark.h>

#include <cmath>

#include "blowup/kernels.hpp"
#include "blowup/selfsim.hpp"
#include "blowup/stationary.hpp"

using namespace blowup;

namespace {

const PowerParam P3(3.0);

ComplexField wave_field(const Grid1D& g) {
  return ComplexField::generate(g.n(), [&](std::size_t i) {
    const double x = g.x(i);
    return Cplx{std::exp(-x * x), 0.3 * std::sin(x)};
  });
}

template <ExecPolicy Policy>
void BM_wave_accel(benchmark::State& state) {
  const Grid1D g(-8.0, 8.0, static_cast<std::size_t>(state.range(0)));
  const ComplexField u = wave_field(g);
  ComplexField a(g.n());
  for (auto _ : state) {
    kernels::wave_accel(Policy, g, P3, u, {}, a);
    benchmark::DoNotOptimize(a.re().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <ExecPolicy Policy>
void BM_cylinder_accel(benchmark::State& state) {
  const CylinderGrid g(static_cast<std::size_t>(state.range(0)), P3);
  const ComplexField w = kappa_field(g, 0.3, 0.5);
  const ComplexField ws = w.scaled(0.01);
  ComplexField out(g.m());
  for (auto _ : state) {
    kernels::cylinder_accel(Policy, g, w, ws, out);
    benchmark::DoNotOptimize(out.re().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <ExecPolicy Policy>
void BM_rk4_step(benchmark::State& state) {
  const CylinderGrid g(static_cast<std::size_t>(state.range(0)), P3);
  SelfSimState st(0.0, g, kappa_field(g, 0.3), ComplexField(g.m()));
  CylinderIntegrator rk(g, Policy);
  const double ds = default_ds(g);
  for (auto _ : state) {
    rk.step(st, ds);
    benchmark::DoNotOptimize(st.w.re().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_wave_accel<ExecPolicy::serial>)->RangeMultiplier(4)->Range(256, 1 << 18);
BENCHMARK(BM_wave_accel<ExecPolicy::parallel>)->RangeMultiplier(4)->Range(256, 1 << 18);
BENCHMARK(BM_cylinder_accel<ExecPolicy::serial>)->RangeMultiplier(4)->Range(256, 1 << 16);
BENCHMARK(BM_cylinder_accel<ExecPolicy::parallel>)->RangeMultiplier(4)->Range(256, 1 << 16);
BENCHMARK(BM_rk4_step<ExecPolicy::serial>)->RangeMultiplier(4)->Range(256, 1 << 14);
BENCHMARK(BM_rk4_step<ExecPolicy::parallel>)->RangeMultiplier(4)->Range(256, 1 << 14);

BENCHMARK_MAIN();
