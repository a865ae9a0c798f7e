#include <benchmark/benchmark.h>

// Local main (the distro's libbenchmark_main.a is not link-compatible here).
BENCHMARK_MAIN();
