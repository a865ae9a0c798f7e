#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "flames/search.hpp"

namespace {

using namespace flames;

search::SearchConfig search_config(search::Policy policy) {
  search::SearchConfig config;
  config.policy = policy;
  return config;
}

void run_search(benchmark::State& state, search::Policy policy) {
  const auto config = search_config(policy);
  for (auto _ : state) {
    state.PauseTiming();
    const auto m = bench::bug_model(0);  // fresh stats per run
    state.ResumeTiming();
    auto result = search::flames_search(*m, bench::corpus()[0].bug,
                                        bench::corpus()[0].suite, config);
    benchmark::DoNotOptimize(result);
  }
}

void BM_FlamesSearchUcb(benchmark::State& state) {
  run_search(state, search::Policy::Ucb);
}
BENCHMARK(BM_FlamesSearchUcb);

void BM_FlamesSearchPucbFixed(benchmark::State& state) {
  run_search(state, search::Policy::PucbFixed);
}
BENCHMARK(BM_FlamesSearchPucbFixed);

void BM_FlamesSearchPucbVar(benchmark::State& state) {
  run_search(state, search::Policy::PucbVar);
}
BENCHMARK(BM_FlamesSearchPucbVar);

void BM_CachedTopKHit(benchmark::State& state) {
  const auto m = bench::bug_model(0);
  search::TopKCache cache(10);
  const auto& prompt = bench::corpus()[0].bug.prompt_tokens;
  (void)search::cached_top_k(cache, *m, prompt, 10);  // warm the entry
  for (auto _ : state) {
    auto dist = search::cached_top_k(cache, *m, prompt, 10);
    benchmark::DoNotOptimize(dist);
  }
}
BENCHMARK(BM_CachedTopKHit);

}  // namespace
