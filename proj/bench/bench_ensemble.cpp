// Serial loop against the OpenMP ensemble on the same replication kernels.

#include <benchmark/benchmark.h>

#include <cmath>

#include "laglad/calculus.hpp"
#include "laglad/ensemble.hpp"
#include "laglad/honest.hpp"
#include "laglad/models.hpp"
#include "laglad/representations.hpp"

namespace {

using namespace laglad;

const TimeGrid& unit_grid() {
  static const TimeGrid g = TimeGrid::uniform(1.0, 1000);
  return g;
}

double local_time_kernel(std::size_t r) {
  const LagladPath b = brownian(share(unit_grid()), SeedSpec{1, r});
  return tanaka_split(decompose(b, FvSpec::martingale(b.size())), 0.0).local_time.L.path().terminal();
}

double representation_kernel(std::size_t r) {
  static const TimeGrid base = TimeGrid::uniform(2.0, 200);
  const HonestTimeScenario sc = brownian_last_zero({2, r}, base);
  return mult_rep(sc).residual_sup;
}

template <double (*Kernel)(std::size_t)>
void serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto v = run_replications_serial<double>(n, Kernel);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <double (*Kernel)(std::size_t)>
void parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto v = run_replications<double>(n, Kernel);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

BENCHMARK(serial<local_time_kernel>)->Name("local_time/serial")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(parallel<local_time_kernel>)->Name("local_time/openmp")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(serial<representation_kernel>)->Name("mult_rep/serial")->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(parallel<representation_kernel>)->Name("mult_rep/openmp")->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
