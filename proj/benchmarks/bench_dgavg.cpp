#include <dgavg/analysis.hpp>
#include <dgavg/dg_space.hpp>
#include <dgavg/forms.hpp>
#include <dgavg/mesh.hpp>
#include <dgavg/mollifier.hpp>
#include <dgavg/solver.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace dgavg;

static void BM_AssembleOipg(benchmark::State& state) {
  const Mesh mesh = build_structured_unit_square(static_cast<int>(state.range(0)));
  const BrokenSpace space(mesh, 1);
  for (auto _ : state) {
    SymSparseMatrix a = assemble_oipg(space, 2.0);
    benchmark::DoNotOptimize(a.values().data());
  }
  state.counters["dofs"] = static_cast<double>(space.total_dofs());
}
BENCHMARK(BM_AssembleOipg)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_CgSolveSipg(benchmark::State& state) {
  const Mesh mesh = build_structured_unit_square(static_cast<int>(state.range(0)));
  const BrokenSpace space(mesh, 1);
  const SymSparseMatrix a = assemble_sipg(space, PenaltySpec{});
  const Problem p = problem_by_name("sin2");
  const std::vector<double> b = assemble_rhs(space, p.g, RhsMode::plain);
  int iterations = 0;
  for (auto _ : state) {
    const SolveResult r = cg_solve(a, b, 1e-10, 20000);
    iterations = r.report.iterations;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_CgSolveSipg)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_GradAverageAt(benchmark::State& state) {
  const Mesh mesh = build_structured_unit_square(16);
  const BrokenSpace space(mesh, static_cast<int>(state.range(0)));
  const DgFunction fn = random_function(space, 1);
  const Mollifier m(mesh.h_global(), 1.6);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.618033988749895;
    const Vec2 x{0.1 + 0.8 * (t - std::floor(t)), 0.1 + 0.8 * (0.5 * t - std::floor(0.5 * t))};
    benchmark::DoNotOptimize(grad_average_at(m, fn, x));
  }
}
BENCHMARK(BM_GradAverageAt)->Arg(0)->Arg(1)->Arg(2);

static void BM_AveragedH1Error(benchmark::State& state) {
  const Mesh mesh = build_structured_unit_square(static_cast<int>(state.range(0)));
  const BrokenSpace space(mesh, 1);
  const Problem p = problem_by_name("sin2");
  const DgFunction fn = project(p.u, space);
  const Mollifier m(mesh.h_global(), 1.6);
  for (auto _ : state) benchmark::DoNotOptimize(averaged_h1_error(p.grad_u, fn, m));
}
BENCHMARK(BM_AveragedH1Error)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
