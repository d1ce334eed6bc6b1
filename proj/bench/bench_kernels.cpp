// Serial against OpenMP kernels: GF(2) row reduction, the envelope, and the
// per-piece stage of densify.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "common.hpp"
#include "corpus.hpp"

using namespace testing_support;

namespace {

gf2::Matrix random_matrix(std::size_t n, std::uint32_t seed) {
  std::mt19937 rng(seed);
  gf2::Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rng() % 2) m.set(i, j);
  return m;
}

void rref_kernel(benchmark::State& state, gf2::Kernel kernel) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto base = random_matrix(n, 7);
  for (auto _ : state) {
    auto m = base;
    benchmark::DoNotOptimize(gf2::rref(m, kernel));
  }
  state.counters["threads"] = kernel == gf2::Kernel::Serial ? 1 : omp_get_max_threads();
}

void envelope_kernel(benchmark::State& state, EnvelopeKernel kernel) {
  auto g = cycle_graph(static_cast<std::size_t>(state.range(0)));
  std::mt19937 rng(11);
  auto f = random_tame(rng, g, 6);
  for (auto _ : state) benchmark::DoNotOptimize(inf_convolution(f, Rational(3), 1, kernel));
  state.counters["threads"] = kernel == EnvelopeKernel::Serial ? 1 : omp_get_max_threads();
}

void densify_threads(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  auto F = one_gen(TameFunction::constant(cycle_graph(6), 0));
  DensifyOptions opts;
  opts.measure = false;
  for (auto _ : state) benchmark::DoNotOptimize(densify(F, frac(1, 4), opts));
  omp_set_num_threads(saved);
  state.counters["threads"] = threads;
}

}  // namespace

BENCHMARK_CAPTURE(rref_kernel, serial, gf2::Kernel::Serial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(rref_kernel, openmp, gf2::Kernel::Parallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(envelope_kernel, serial, EnvelopeKernel::Serial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(envelope_kernel, openmp, EnvelopeKernel::Parallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(densify_threads)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
