#include <benchmark/benchmark.h>

#include "cglstab/config.hpp"
#include "cglstab/utm.hpp"

using namespace cglstab;

namespace {

struct Fixture {
  PhysParams pp = experiment1_params();
  Grid g = Grid::uniform(201, pp.L);
  KernelTable kt = build_kernel_table(pp, g);
  ComplexMatrix K = build_kernel_operator(g, kt);
  OperatorMatrix PN = build_projection(g, pp.n_modes);
  UpsilonResult ups = build_upsilon(pp, g, K);
  ControlLaw law = build_control_law(pp, g, PN, ups);
  ComplexField u = random_mode_field(g, 8, 42);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_KernelTable(benchmark::State& state) {
  const auto& f = fixture();
  const Grid g = Grid::uniform(static_cast<int>(state.range(0)), f.pp.L);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_kernel_table(f.pp, g));
  }
}
BENCHMARK(BM_KernelTable)->Arg(101)->Arg(201)->Arg(401);

void BM_UpsilonBuild(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_upsilon(f.pp, f.g, f.K));
  }
}
BENCHMARK(BM_UpsilonBuild);

void BM_Feedback(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(feedback(f.law, f.g, f.u));
  }
}
BENCHMARK(BM_Feedback);

void BM_LinearStep(benchmark::State& state) {
  const auto& f = fixture();
  const TimeGrid tg = TimeGrid::uniform(2001, 1.0);
  const SystemMatrices sys = build_system(f.pp, f.g, tg);
  step_linear(sys, f.u, Complex{0.0, 0.0}); // factor outside the loop
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_linear(sys, f.u, Complex{0.1, 0.0}));
  }
}
BENCHMARK(BM_LinearStep);

void BM_NonlinearStep(benchmark::State& state) {
  const PhysParams pp = experiment2_params();
  const Grid g = Grid::uniform(201, pp.L);
  const TimeGrid tg = TimeGrid::uniform(6001, 3.0);
  const SystemMatrices sys = build_system(pp, g, tg);
  const ComplexField u = random_mode_field(g, 4, 7);
  step_nonlinear(sys, u, nullptr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_nonlinear(sys, u, nullptr));
  }
}
BENCHMARK(BM_NonlinearStep);

void BM_UtmEvaluate(benchmark::State& state) {
  PhysParams pp;
  pp.nu = 1.0;
  pp.L = 1.0;
  const Grid g = Grid::uniform(201, pp.L);
  ComplexField u0(g.n);
  for (int i = 0; i < g.n; ++i)
    u0(i) = Complex{std::sin(1.5707963267948966 * g.x(i)), 0.0};
  const UtmEvaluator ev(pp, g, u0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.evaluate(0.5, 0.1));
  }
}
BENCHMARK(BM_UtmEvaluate);

} // namespace

BENCHMARK_MAIN();
