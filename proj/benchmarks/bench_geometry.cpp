#include <benchmark/benchmark.h>

#include <random>

#include "grinder/geometry.hpp"

using namespace grinder;

namespace {

Halfspace random_cut(Rng& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Vector n(3);
  n << g(rng), g(rng), g(rng);
  return Halfspace::make(n, u(rng));
}

// A cube cut a few times, so splits see a realistic vertex count.
Polytope carved(Rng& rng, int cuts) {
  Polytope p = Polytope::cube(3);
  for (int i = 0; i < cuts; ++i)
    if (auto q = intersect_halfspace(p, random_cut(rng)); q && q->full_dimensional()) p = std::move(*q);
  return p;
}

void BM_Split(benchmark::State& state) {
  Rng rng(1);
  const Polytope p = carved(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(p.split(random_cut(rng)));
}
BENCHMARK(BM_Split)->Arg(0)->Arg(4)->Arg(12);

// Volumes are cached on construction, so this times vertex enumeration plus
// the volume computation from scratch.
void BM_Volume(benchmark::State& state) {
  Rng rng(2);
  const Polytope p = carved(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(volume(Polytope::from_halfspaces(3, p.halfspaces())));
}
BENCHMARK(BM_Volume)->Arg(0)->Arg(4)->Arg(12);

void BM_SampleUniform(benchmark::State& state) {
  Rng rng(3);
  const Polytope p = carved(rng, 6);
  for (auto _ : state) benchmark::DoNotOptimize(sample_uniform(p, rng));
}
BENCHMARK(BM_SampleUniform);

}  // namespace
