#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "teachcert/dsos.hpp"
#include "teachcert/lp.hpp"

namespace {

using namespace teachcert;

lp::Problem lattice_program(int side, unsigned t) {
  const auto pomdp = lattice_generator(side, side, {1, 1}, {side, side});
  const auto policy = policy_to_partition(pomdp, AdaptivePolicy::ada_l());
  return assemble_policy(pomdp, policy, Rational(4, 5), t, 2).front().to_lp();
}

void BM_SolveFloatLattice(benchmark::State& state) {
  const auto p = lattice_program(static_cast<int>(state.range(0)), static_cast<unsigned>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve(p, lp::Mode::Float));
  state.counters["rows"] = static_cast<double>(p.num_rows());
  state.counters["columns"] = static_cast<double>(p.num_columns());
}
BENCHMARK(BM_SolveFloatLattice)->Args({3, 2})->Args({3, 4})->Args({4, 4})->Unit(benchmark::kMillisecond);

void BM_SolveAuditedToy(benchmark::State& state) {
  const auto p = assemble_monolithic(testing::toy_pomdp(), Rational(2, 5), static_cast<unsigned>(state.range(0)), 2).to_lp();
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve_audited(p));
}
BENCHMARK(BM_SolveAuditedToy)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_SolveExactToy(benchmark::State& state) {
  const auto p = assemble_monolithic(testing::toy_pomdp(), Rational(2, 5), static_cast<unsigned>(state.range(0)), 2).to_lp();
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve(p, lp::Mode::Exact));
}
BENCHMARK(BM_SolveExactToy)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

}  // namespace
