// Microbenchmarks for the hot paths: assembly, linear algebra kernels, one
// implicit step through each feedback structure, and short end-to-end runs.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "cif/assembly.hpp"
#include "cif/convergence.hpp"
#include "cif/linalg.hpp"
#include "cif/mesh.hpp"
#include "cif/stepper.hpp"

using namespace cif;

namespace {

const ModelParams kParams{0.1, 9.0, 9.0, 20.0, 1.0};

FemFunction initial_state(const MeshPtr& mesh) {
  return project_initial([](double x) { return x * (1.0 - x); }, mesh,
                         BoundaryCondition::Mixed);
}

void BM_AssembleSystem(benchmark::State& state) {
  const MeshPtr mesh = share(uniform_partition(static_cast<int>(state.range(0))));
  const InterpolantSpec spec = InterpolantSpec::nodal();
  for (auto _ : state) {
    AssembledSystem sys = assemble_system(mesh, BoundaryCondition::Mixed, &spec);
    benchmark::DoNotOptimize(sys.M.diag.data());
  }
}
BENCHMARK(BM_AssembleSystem)->Arg(100)->Arg(1000)->Arg(10000);

void BM_FourierAssembly(benchmark::State& state) {
  const MeshPtr mesh = share(uniform_partition(1000));
  const InterpolantSpec spec = InterpolantSpec::fourier(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    FeedbackOperator op = feedback_operator(spec, *mesh, BoundaryCondition::Mixed);
    benchmark::DoNotOptimize(op.lowrank_rows.data());
  }
}
BENCHMARK(BM_FourierAssembly)->Arg(4)->Arg(16);

void BM_CubicTerm(benchmark::State& state) {
  const MeshPtr mesh = share(uniform_partition(static_cast<int>(state.range(0))));
  const FemFunction y = initial_state(mesh);
  for (auto _ : state) {
    auto c = cubic_term(y);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_CubicTerm)->Arg(100)->Arg(1000)->Arg(10000);

void BM_TridiagonalSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MeshPtr mesh = share(uniform_partition(n));
  const TridiagonalMatrix M = mass_matrix(*mesh, BoundaryCondition::Mixed);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> rhs(M.n());
  for (double& v : rhs) v = dist(gen);
  for (auto _ : state) {
    auto x = solve_tridiagonal(M, rhs);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_TridiagonalSolve)->Arg(100)->Arg(1000)->Arg(10000);

void BM_BandedLU(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  BandedMatrix B(n, 2, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j)
      B.at(i, j) = dist(gen);
    B.at(i, i) += 6.0;
  }
  std::vector<double> rhs(n);
  for (double& v : rhs) v = dist(gen);
  for (auto _ : state) {
    auto x = BandedLU(B).solve(rhs);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_BandedLU)->Arg(100)->Arg(1000)->Arg(10000);

void BM_BackwardEulerStep(benchmark::State& state) {
  const MeshPtr mesh = share(uniform_partition(static_cast<int>(state.range(0))));
  const InterpolantSpec spec = InterpolantSpec::nodal();
  const AssembledSystem sys = assemble_system(mesh, BoundaryCondition::Mixed, &spec);
  const FemFunction y = initial_state(mesh);
  StepperConfig cfg;
  cfg.k = 1e-3;
  cfg.T = 1.0;
  for (auto _ : state) {
    FemFunction next = backward_euler_step(y, kParams, sys, cfg);
    benchmark::DoNotOptimize(next.coeffs.data());
  }
}
BENCHMARK(BM_BackwardEulerStep)->Arg(100)->Arg(1000)->Arg(10000);

void BM_BackwardEulerStepFourier(benchmark::State& state) {
  const MeshPtr mesh = share(uniform_partition(1000));
  const InterpolantSpec spec = InterpolantSpec::fourier(static_cast<int>(state.range(0)));
  const AssembledSystem sys = assemble_system(mesh, BoundaryCondition::Mixed, &spec);
  const FemFunction y = initial_state(mesh);
  StepperConfig cfg;
  cfg.k = 1e-3;
  cfg.T = 1.0;
  for (auto _ : state) {
    FemFunction next = backward_euler_step(y, kParams, sys, cfg);
    benchmark::DoNotOptimize(next.coeffs.data());
  }
}
BENCHMARK(BM_BackwardEulerStepFourier)->Arg(4)->Arg(16);

void BM_SimulateShort(benchmark::State& state) {
  const MeshPtr mesh = share(uniform_partition(static_cast<int>(state.range(0))));
  const FemFunction y0h = initial_state(mesh);
  StepperConfig cfg;
  cfg.k = 5e-3;
  cfg.T = 0.5;
  for (auto _ : state) {
    Trajectory traj =
        simulate(y0h, kParams, InterpolantSpec::nodal(), BoundaryCondition::Mixed, cfg);
    benchmark::DoNotOptimize(traj.l2.data());
  }
}
BENCHMARK(BM_SimulateShort)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_FdOracle(benchmark::State& state) {
  const auto y0 = [](double x) { return x * (1.0 - x); };
  for (auto _ : state) {
    FdSolution sol =
        fd_oracle(kParams, BoundaryCondition::Mixed, y0, static_cast<int>(state.range(0)),
                  100, 0.5);
    benchmark::DoNotOptimize(sol.y.data());
  }
}
BENCHMARK(BM_FdOracle)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
