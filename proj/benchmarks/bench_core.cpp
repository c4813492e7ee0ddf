#include <benchmark/benchmark.h>

#include <numbers>

#include "dynhomog/dispersion.hpp"
#include "dynhomog/homogenize.hpp"
#include "dynhomog/transfer_matrix.hpp"

using namespace dynhomog;

namespace {

constexpr double kPi = std::numbers::pi;

UnitCell bilayer() {
  return build_cell({{1.0, 1.0, 0.5}, {4.0, 1.0 / 16.0, 0.5}});
}

void bm_assemble(benchmark::State& state) {
  const int per_layer = static_cast<int>(state.range(0));
  const UnitCell cell = bilayer();
  const DiscretizedCell dcell =
      discretize(cell, std::vector<int>{per_layer, per_layer},
                 reference_from_average(cell));
  const SpectralWorkspace ws(dcell, SpectralBasis(per_layer), 0.5 * kPi);
  double omega = 1.0;
  for (auto _ : state) {
    omega = omega < 1.5 ? omega + 1e-6 : 1.0;  // avoid caching effects
    benchmark::DoNotOptimize(ws.assemble(omega));
  }
}
BENCHMARK(bm_assemble)->Arg(5)->Arg(15)->Arg(30);

void bm_eigenfield_solve(benchmark::State& state) {
  const int per_layer = static_cast<int>(state.range(0));
  const UnitCell cell = bilayer();
  const DiscretizedCell dcell =
      discretize(cell, std::vector<int>{per_layer, per_layer},
                 reference_from_average(cell));
  const AssembledSystem sys =
      assemble(dcell, SpectralBasis(per_layer), 1.1, 0.5 * kPi);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_eigenfields(sys, dcell.reference()));
  }
}
BENCHMARK(bm_eigenfield_solve)->Arg(5)->Arg(15)->Arg(30);

void bm_residual(benchmark::State& state) {
  const UnitCell cell = bilayer();
  const DiscretizedCell dcell =
      discretize(cell, {15, 15}, reference_from_average(cell));
  const SpectralWorkspace ws(dcell, SpectralBasis(15), 0.5 * kPi);
  double omega = 1.0;
  for (auto _ : state) {
    omega = omega < 1.5 ? omega + 1e-6 : 1.0;
    benchmark::DoNotOptimize(residual(ws, omega));
  }
}
BENCHMARK(bm_residual);

void bm_branch_search(benchmark::State& state) {
  const UnitCell cell = bilayer();
  const DiscretizedCell dcell =
      discretize(cell, {15, 15}, reference_from_average(cell));
  const SpectralBasis basis(15);
  ScanParams scan;
  scan.omega_max = 13.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_branches(dcell, basis, 0.5 * kPi, 3, scan));
  }
}
BENCHMARK(bm_branch_search)->Unit(benchmark::kMillisecond);

void bm_exact_dispersion(benchmark::State& state) {
  const UnitCell cell = bilayer();
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_dispersion(cell, 0.5 * kPi, 3));
  }
}
BENCHMARK(bm_exact_dispersion);

}  // namespace

BENCHMARK_MAIN();
