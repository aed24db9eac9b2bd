#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "teachcert/oracle.hpp"

namespace {

using namespace teachcert;

void BM_EnumerateToyArbitrary(benchmark::State& state) {
  const auto pomdp = testing::toy_pomdp();
  EnumerateOptions opt;
  opt.merge_duplicates = state.range(1) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate(pomdp, static_cast<unsigned>(state.range(0)), OracleMode::Arbitrary, nullptr, opt));
}
BENCHMARK(BM_EnumerateToyArbitrary)->Args({4, 0})->Args({8, 0})->Args({8, 1})->Unit(benchmark::kMicrosecond);

void BM_EnumerateLatticePolicy(benchmark::State& state) {
  const auto pomdp = lattice_generator(4, 4, {1, 1}, {3, 4});
  const auto policy = policy_to_partition(pomdp, AdaptivePolicy::ada_l());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        enumerate(pomdp, static_cast<unsigned>(state.range(0)), OracleMode::FixedPolicy, &policy));
}
BENCHMARK(BM_EnumerateLatticePolicy)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

}  // namespace
