#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "teachcert/belief.hpp"
#include "teachcert/polynomial.hpp"

namespace {

using namespace teachcert;

void BM_ComposeCleared(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto d = static_cast<unsigned>(state.range(1));
  const auto pomdp = lattice_generator(1, n, {1, 1}, {1, n});
  const auto forms = linear_forms(pomdp, 0, 0);
  testing::Rng rng(7);
  const Poly B = testing::random_poly(rng, pomdp.num_hypotheses(), pomdp.num_hypotheses(), d, 20);
  for (auto _ : state) benchmark::DoNotOptimize(compose_cleared(B, forms, d));
}
BENCHMARK(BM_ComposeCleared)->Args({4, 2})->Args({8, 2})->Args({16, 2})->Args({8, 4});

void BM_PolyMultiply(benchmark::State& state) {
  testing::Rng rng(11);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Poly p = testing::random_poly(rng, n, n, 2, 30), q = testing::random_poly(rng, n, n, 2, 30);
  for (auto _ : state) benchmark::DoNotOptimize(p * q);
}
BENCHMARK(BM_PolyMultiply)->Arg(4)->Arg(8)->Arg(16);

}  // namespace
