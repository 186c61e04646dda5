#include <benchmark/benchmark.h>

#include "shellstab/asymmetry.hpp"
#include "shellstab/domains.hpp"
#include "shellstab/fem.hpp"
#include "shellstab/mesh.hpp"
#include "shellstab/shell.hpp"
#include "shellstab/specfun.hpp"
#include "shellstab/steklov_quotient.hpp"

namespace {

using namespace shellstab;

const ShellGeometry kPlane{2, -1.0, 1.0, 2.0};

HoledDomain perturbed() {
  return project_constraints(HoledDomain(kPlane, BoundaryProfile::fourier({0.0, 0.0, 0.0, 0.04, 0.01, 0.0, -0.008}),
                                         BoundaryProfile::fourier({0.0, 0.06, 0.0, 0.0, 0.03, 0.01, 0.0})));
}

void BM_BesselK(benchmark::State& state) {
  const specfun::BesselOrder nu(0.5 * static_cast<double>(state.range(0)));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::bessel_k(nu, x));
    x = x < 30.0 ? x * 1.01 : 0.1;
  }
}
BENCHMARK(BM_BesselK)->Arg(0)->Arg(1)->Arg(8);

void BM_ShellEigenvalue(benchmark::State& state) {
  ShellGeometry g = kPlane;
  g.beta = -0.25 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shell_eigenvalue(g));
  }
}
BENCHMARK(BM_ShellEigenvalue)->Arg(1)->Arg(4)->Arg(16);

void BM_StabilityGap(benchmark::State& state) {
  const auto u = project_perimeter(BoundaryProfile::fourier({0.0, 0.0, 0.0, 0.03, 0.01, 0.02, 0.0}), kPlane);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stability_gap(u, kPlane));
  }
}
BENCHMARK(BM_StabilityGap);

void BM_HybridAsymmetry(benchmark::State& state) {
  const auto d = perturbed();
  for (auto _ : state) {
    benchmark::DoNotOptimize(hybrid_asymmetry(d));
  }
}
BENCHMARK(BM_HybridAsymmetry)->Unit(benchmark::kMillisecond);

void BM_MeshHoledDomain(benchmark::State& state) {
  const auto d = perturbed();
  const double h = 0.01 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mesh_holed_domain(d, h));
  }
}
BENCHMARK(BM_MeshHoledDomain)->Arg(8)->Arg(4)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_RobinSolve(benchmark::State& state) {
  const auto mesh = mesh_holed_domain(perturbed(), 0.01 * static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(robin_neumann_eigenvalue(mesh, -1.0));
  }
  state.counters["vertices"] = static_cast<double>(mesh.vertices.size());
}
BENCHMARK(BM_RobinSolve)->Arg(8)->Arg(4)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SteklovSolve(benchmark::State& state) {
  const auto mesh = mesh_holed_domain(perturbed(), 0.01 * static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(steklov_neumann_eigenvalue(mesh));
  }
  state.counters["vertices"] = static_cast<double>(mesh.vertices.size());
}
BENCHMARK(BM_SteklovSolve)->Arg(8)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
