#include <benchmark/benchmark.h>

// The packaged benchmark_main archive is not always link-compatible, so the
// entry point lives here.
BENCHMARK_MAIN();
