#include "spincm/flows.hpp"
#include "spincm/kp.hpp"
#include "spincm/lax.hpp"
#include "spincm/oracles.hpp"
#include "spincm/phase.hpp"

#include <benchmark/benchmark.h>

using namespace spincm;

static void bm_build_lax(benchmark::State& st) {
  const PhaseState s = random_state(static_cast<int>(st.range(0)), 2, 1);
  for (auto _ : st) benchmark::DoNotOptimize(build_lax(s));
}
BENCHMARK(bm_build_lax)->Arg(3)->Arg(5)->Arg(10);

static void bm_grad_hamiltonian(benchmark::State& st) {
  const PhaseState s = random_state(static_cast<int>(st.range(0)), 2, 1);
  for (auto _ : st) benchmark::DoNotOptimize(grad_hamiltonian(s, 3));
}
BENCHMARK(bm_grad_hamiltonian)->Arg(3)->Arg(5)->Arg(10);

static void bm_vector_field(benchmark::State& st) {
  const PhaseState s = random_state(5, 3, 2);
  const auto route = st.range(0) == 0 ? &vector_field_gradient : &vector_field_residue;
  for (auto _ : st) benchmark::DoNotOptimize(route(s, 3, Tolerances{}));
}
BENCHMARK(bm_vector_field)->Arg(0)->Arg(1);

static void bm_integrate_t2(benchmark::State& st) {
  const PhaseState s = random_state(3, 2, 42);
  FlowSpec spec;
  spec.t_final = 0.1;
  spec.record_every = 1000;
  spec.method = st.range(0) == 0 ? Method::RK4 : Method::RK45;
  for (auto _ : st) benchmark::DoNotOptimize(flow(s, spec));
}
BENCHMARK(bm_integrate_t2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void bm_resolvent_residue(benchmark::State& st) {
  const PhaseState s = random_state(5, 2, 3);
  const LaxData lax = build_lax(s);
  for (auto _ : st) benchmark::DoNotOptimize(resolvent_residue(lax.L, 5, lax.R));
}
BENCHMARK(bm_resolvent_residue);

static void bm_contour_residue(benchmark::State& st) {
  const PhaseState s = random_state(5, 2, 3);
  const LaxData lax = build_lax(s);
  for (auto _ : st) benchmark::DoNotOptimize(oracle::contour_residue(lax.L, 5, lax.R));
}
BENCHMARK(bm_contour_residue);

static void bm_psi_pair(benchmark::State& st) {
  const PhaseState s = random_state(5, 2, 4);
  for (auto _ : st) {
    benchmark::DoNotOptimize(psi_pair(s, TimeVector{}, Complex{1.3, 0.7}, Complex{0.2, 4.0}));
  }
}
BENCHMARK(bm_psi_pair);

BENCHMARK_MAIN();
