// Microbenchmarks for the hot paths: symbol-table construction, per-mode
// boundary solves, full-grid solves with residual reports, and a certifier
// sample batch.

#include <benchmark/benchmark.h>

#include "stokes2p/boundary.hpp"
#include "stokes2p/certifier.hpp"
#include "stokes2p/resolvent.hpp"
#include "stokes2p/rng.hpp"
#include "stokes2p/symbols.hpp"

using namespace stokes2p;

namespace {

SpectralPoint sample_point(int n) {
  SpectralPoint p;
  p.dim = n;
  p.lambda = cd(2.0, 1.5);
  p.xi[0] = cd(1.1, 0.2);
  if (n == 3) p.xi[1] = cd(-0.7, 0.1);
  return p;
}

FluidParams sample_params() {
  FluidParams fp;
  fp.mu_plus = 1.2;
  fp.mu_minus = 0.8;
  fp.rho_plus = 0.9;
  fp.rho_minus = 1.3;
  fp.c_sigma = 1.0;
  fp.c_g = 0.5;
  return fp;
}

void bm_symbol_table(benchmark::State& state) {
  const SpectralPoint p = sample_point(static_cast<int>(state.range(0)));
  const FluidParams fp = sample_params();
  for (auto _ : state) {
    const SymbolTable t = build_symbol_table(p, fp);
    benchmark::DoNotOptimize(t.detL_direct);
  }
}
BENCHMARK(bm_symbol_table)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void bm_boundary_mode(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SymbolTable t = build_symbol_table(sample_point(n), sample_params());
  ModeJumps jumps;
  for (int k = 0; k < n; ++k) {
    jumps.g[k] = cd(0.3, -0.1);
    jumps.h[k] = cd(-0.2, 0.5);
  }
  for (auto _ : state) {
    const ModeSolution sol = boundary_solve_mode(t, jumps);
    benchmark::DoNotOptimize(sol.eval(Side::plus, 0.5).u[0]);
  }
}
BENCHMARK(bm_boundary_mode)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

GridSpec bench_grid(int modes) {
  GridSpec g;
  g.n = 2;
  g.modes[0] = modes;
  g.L[0] = 1.0;
  g.n_vertical = 48;
  g.X = 8.0;
  g.n_vert_modes = 8;
  return g;
}

void bm_boundary_solve_grid(benchmark::State& state) {
  const GridSpec g = bench_grid(static_cast<int>(state.range(0)));
  InterfaceData data = make_interface_data(g);
  Rng rng(42);
  for (std::size_t m = 1; m < g.mode_count(); ++m)
    for (int j = 0; j < g.n; ++j) {
      data.g[j][m] = rng.unit_normalish();
      data.h[j][m] = rng.unit_normalish();
    }
  const cd lambda(2.0, 1.0);
  const FluidParams fp = sample_params();
  for (auto _ : state) {
    const TwoPhaseField u = boundary_solve(g, data, lambda, fp);
    benchmark::DoNotOptimize(u.trace(1, Side::plus).u[0]);
  }
}
BENCHMARK(bm_boundary_solve_grid)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void bm_residual_report(benchmark::State& state) {
  const GridSpec g = bench_grid(64);
  InterfaceData data = make_interface_data(g);
  Rng rng(43);
  for (std::size_t m = 1; m < g.mode_count(); ++m)
    for (int j = 0; j < g.n; ++j) data.h[j][m] = rng.unit_normalish();
  const TwoPhaseField u = boundary_solve(g, data, cd(2.0, 1.0), sample_params());
  for (auto _ : state) {
    const ResidualReport rep = residual_report(u, nullptr, &data);
    benchmark::DoNotOptimize(rep.momentum_fd);
  }
}
BENCHMARK(bm_residual_report)->Unit(benchmark::kMillisecond);

void bm_certify_batch(benchmark::State& state) {
  SectorSampling cfg;
  cfg.n_radii = 4;
  cfg.n_angles = 5;
  cfg.n_xn = 3;
  cfg.n_jitter = 40;
  const std::vector<SectorSample> samples = sample_sectors(cfg, 7);
  const FluidParams fp = sample_params();
  const CertifyLimits lim;
  for (auto _ : state) {
    const std::vector<BoundReport> reps = check_symbol_estimate(samples, fp, lim, 1);
    benchmark::DoNotOptimize(reps.front().worst_ratio);
  }
}
BENCHMARK(bm_certify_batch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
