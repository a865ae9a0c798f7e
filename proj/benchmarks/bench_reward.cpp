#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "flames/expr.hpp"
#include "flames/reward.hpp"

namespace {

using namespace flames;

void BM_EvaluateReward(benchmark::State& state) {
  const auto& entry = bench::corpus()[0];
  for (auto _ : state) {
    auto report =
        reward::evaluate_reward(entry.ground_truth, entry.suite, bench::vocab());
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_EvaluateReward);

void BM_DecodeProgram(benchmark::State& state) {
  const auto& entry = bench::corpus()[0];
  for (auto _ : state) {
    auto program = expr::decode_program(entry.ground_truth, bench::vocab());
    benchmark::DoNotOptimize(program);
  }
}
BENCHMARK(BM_DecodeProgram);

void BM_GenerateCorpus(benchmark::State& state) {
  const int n_bugs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto corpus = reward::generate_bug_corpus(7, n_bugs, bench::vocab());
    benchmark::DoNotOptimize(corpus);
  }
}
BENCHMARK(BM_GenerateCorpus)->Arg(1)->Arg(10);

}  // namespace
