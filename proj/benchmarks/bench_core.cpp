#include <benchmark/benchmark.h>

#include "tonelli/action.hpp"
#include "tonelli/fourier.hpp"
#include "tonelli/integrator.hpp"
#include "tonelli/weak_kam.hpp"

using namespace tonelli;

namespace {

Vec vec1(double a) { return Vec::Constant(1, a); }
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

void bm_flow_verlet_pendulum(benchmark::State& state) {
  const auto h = make_hamiltonian("pendulum", 1);
  const IntegratorSpec spec{"verlet", 1e-3};
  for (auto _ : state) {
    const LiftedState z = flow(*h, LiftedState(vec1(0.1), vec1(1.8)), 10.0, spec);
    benchmark::DoNotOptimize(z.x[0]);
  }
}
BENCHMARK(bm_flow_verlet_pendulum);

void bm_flow_midpoint_shear2(benchmark::State& state) {
  const auto h = make_hamiltonian("shear", 2);
  const IntegratorSpec spec{"midpoint", 1e-3};
  for (auto _ : state) {
    const LiftedState z = flow(*h, LiftedState(vec2(0.1, 0.7), vec2(1.0, -0.5)), 10.0, spec);
    benchmark::DoNotOptimize(z.x[0]);
  }
}
BENCHMARK(bm_flow_midpoint_shear2);

void bm_tangent_flow_pendulum(benchmark::State& state) {
  const auto h = make_hamiltonian("pendulum", 1);
  const IntegratorSpec spec{"verlet", 1e-3};
  for (auto _ : state) {
    const Mat m = tangent_flow(*h, LiftedState(vec1(0.1), vec1(1.8)), 5.0, spec);
    benchmark::DoNotOptimize(m(0, 0));
  }
}
BENCHMARK(bm_tangent_flow_pendulum);

void bm_min_action_pendulum(benchmark::State& state) {
  const auto h = make_hamiltonian("pendulum", 1);
  MinActionOptions opt;
  opt.multistart = false;  // kernel-style single-lift solve
  for (auto _ : state) {
    const ActionResult r = min_action(*h, vec1(0.1), vec1(0.6), 0.5, opt);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_min_action_pendulum);

void bm_min_action_multistart(benchmark::State& state) {
  const auto h = make_hamiltonian("pendulum", 1);
  for (auto _ : state) {
    const ActionResult r = min_action(*h, vec1(0.1), vec1(0.6), 1.0);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_min_action_multistart);

void bm_dft1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CVec f(n);
  for (int k = 0; k < n; ++k) f[k] = std::complex<double>(std::sin(0.37 * k), 0.0);
  for (auto _ : state) {
    const CVec c = dft1(f);
    benchmark::DoNotOptimize(c[0]);
  }
}
BENCHMARK(bm_dft1)->Arg(64)->Arg(256)->Arg(1024);

void bm_lax_oleinik_sweeps(benchmark::State& state) {
  const auto h = make_hamiltonian("shear", 1);
  const Grid grid({32});
  WeakKamOptions opt;
  opt.max_sweeps = 200;
  const auto kernel = std::make_shared<const ActionKernel>(*h, grid, opt.tau, opt.action);
  for (auto _ : state) {
    const ValueGrid vg = lax_oleinik_alpha(*h, vec1(0.35), grid, opt, kernel);
    benchmark::DoNotOptimize(vg.alpha);
  }
}
BENCHMARK(bm_lax_oleinik_sweeps);

}  // namespace

BENCHMARK_MAIN();
