// Serial reference versus OpenMP paths of the data-parallel kernels.
// Arguments: matrix side, then 0 for serial or 1 for parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "rrank/kernels.hpp"
#include "rrank/lpca.hpp"
#include "rrank/nested.hpp"
#include "rrank/perm.hpp"
#include "rrank/proj.hpp"

using namespace rrank;

namespace {

BinaryMatrix random_binary(Index m, Index n, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution bit(density);
  BinaryMatrix B(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) B.set(i, j, bit(rng));
  return B;
}

RealMatrix random_real(Index m, Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  RealMatrix A(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = normal(rng);
  return A;
}

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(1) ? "parallel" : "serial"); }

void BM_RoundProduct(benchmark::State& state) {
  const Index n = state.range(0);
  const RealMatrix L = random_real(n, 20, 1);
  const RealMatrix R = random_real(n, 20, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::round_product(L, R, 0.5, exec_of(state)));
  label(state);
}

void BM_RoundingMismatches(benchmark::State& state) {
  const Index n = state.range(0);
  const RealMatrix L = random_real(n, 20, 1);
  const RealMatrix R = random_real(n, 20, 2);
  const BinaryMatrix B = kernels::round_product(L, R, 0.5, Exec::serial);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::rounding_mismatches(B, L, R, 0.5, exec_of(state)));
  label(state);
}

void BM_Hamming(benchmark::State& state) {
  const Index n = state.range(0);
  const BinaryMatrix A = random_binary(n, n, 0.5, 1);
  const BinaryMatrix B = random_binary(n, n, 0.5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::hamming(A, B, exec_of(state)));
  label(state);
}

void BM_ProjColumnLps(benchmark::State& state) {
  const Index n = state.range(0);
  const BinaryMatrix B = random_binary(n, n, 0.3, 3);
  proj::ProjConfig cfg;
  cfg.exec = exec_of(state);
  const RealMatrix L = proj::achlioptas_project(B, 8, 4);
  for (auto _ : state) benchmark::DoNotOptimize(proj::separate_columns(B, L, 0.5, cfg));
  label(state);
}

void BM_LpcaFit(benchmark::State& state) {
  const Index n = state.range(0);
  const BinaryMatrix B = random_binary(n, n, 0.4, 5);
  lpca::LpcaConfig cfg;
  cfg.exec = exec_of(state);
  cfg.restarts = 1;
  cfg.max_iters = 20;
  for (auto _ : state) benchmark::DoNotOptimize(lpca::fit(B, 5, 0.5, cfg));
  label(state);
}

void BM_PermPolynomial(benchmark::State& state) {
  const Index n = state.range(0);
  const BinaryMatrix B = random_binary(n, n, 0.5, 6);
  const Permutation order = perm::order_rows(B, {});
  for (auto _ : state) benchmark::DoNotOptimize(perm::polynomial_factorization(B, order, exec_of(state)));
  label(state);
}

void BM_Nexhaust(benchmark::State& state) {
  const Index n = state.range(0);
  const BinaryMatrix B = random_binary(n, n, 0.3, 7);
  for (auto _ : state) benchmark::DoNotOptimize(nested::nexhaust(B, 5, exec_of(state)));
  label(state);
}

void sizes(benchmark::internal::Benchmark* b, std::initializer_list<long> sides) {
  for (long side : sides)
    for (long parallel : {0L, 1L}) b->Args({side, parallel});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_RoundProduct)->Apply([](auto* b) { sizes(b, {200, 1000}); });
BENCHMARK(BM_RoundingMismatches)->Apply([](auto* b) { sizes(b, {200, 1000}); });
BENCHMARK(BM_Hamming)->Apply([](auto* b) { sizes(b, {200, 2000}); });
BENCHMARK(BM_ProjColumnLps)->Apply([](auto* b) { sizes(b, {40, 80}); });
BENCHMARK(BM_LpcaFit)->Apply([](auto* b) { sizes(b, {50, 100}); });
BENCHMARK(BM_PermPolynomial)->Apply([](auto* b) { sizes(b, {60, 120}); });
BENCHMARK(BM_Nexhaust)->Apply([](auto* b) { sizes(b, {200, 400}); });

BENCHMARK_MAIN();
