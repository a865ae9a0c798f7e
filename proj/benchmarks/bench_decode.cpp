#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "flames/decode.hpp"

namespace {

using namespace flames;

void BM_GreedyDecode(benchmark::State& state) {
  const auto m = bench::bug_model(0);
  const auto& prompt = bench::corpus()[0].bug.prompt_tokens;
  decode::DecodeConfig config;
  for (auto _ : state) {
    auto seq = decode::greedy_decode(*m, prompt, config);
    benchmark::DoNotOptimize(seq);
  }
}
BENCHMARK(BM_GreedyDecode);

void BM_BeamSearch(benchmark::State& state) {
  const auto m = bench::bug_model(0);
  const auto& prompt = bench::corpus()[0].bug.prompt_tokens;
  decode::DecodeConfig config;
  config.beam_size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto seqs = decode::beam_search(*m, prompt, config);
    benchmark::DoNotOptimize(seqs);
  }
}
BENCHMARK(BM_BeamSearch)->Arg(1)->Arg(10)->Arg(50)->Arg(200);

void BM_SequentialBeamSearch(benchmark::State& state) {
  const auto m = bench::bug_model(0);
  const auto& prompt = bench::corpus()[0].bug.prompt_tokens;
  decode::DecodeConfig config;
  config.beam_size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto seqs = decode::sequential_beam_search(*m, prompt, config);
    benchmark::DoNotOptimize(seqs);
  }
}
BENCHMARK(BM_SequentialBeamSearch)->Arg(10)->Arg(200);

void BM_MultipleSampling(benchmark::State& state) {
  const auto m = bench::bug_model(0);
  const auto& prompt = bench::corpus()[0].bug.prompt_tokens;
  decode::DecodeConfig config;
  config.rng_seed = 7;
  const int n_samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto seqs = decode::multiple_sampling(*m, prompt, config, n_samples);
    benchmark::DoNotOptimize(seqs);
  }
}
BENCHMARK(BM_MultipleSampling)->Arg(10)->Arg(200);

}  // namespace
