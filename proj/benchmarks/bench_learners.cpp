#include <benchmark/benchmark.h>

#include "grinder/environments.hpp"
#include "grinder/grinder.hpp"

using namespace grinder;

namespace {

std::vector<Vector> action_set(std::size_t k) {
  Rng rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> out(k, Vector(3));
  for (auto& a : out) a << u(rng), u(rng), u(rng);
  return out;
}

void BM_GrinderDiscreteRound(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  GrinderParams p;
  p.eta = p.gamma = default_rate(static_cast<double>(k), 1000);
  GrinderDiscrete learner(action_set(k), p, std::make_unique<ExactDiscreteOracle>());
  const AgentModel model = AgentModel::indicator(0.1);
  Rng rng(1);
  for (auto _ : state) {
    const LabeledPoint sigma = gaussian_draw(rng, GaussianParams{});
    const Vector a = learner.select(rng);
    benchmark::DoNotOptimize(learner.update(best_response(a, sigma, model), sigma, model, rng));
  }
}
BENCHMARK(BM_GrinderDiscreteRound)->Arg(10)->Arg(100);

// Cost of one continuous round after `range(0)` rounds of cuts.
void BM_GrinderContinuousRound(benchmark::State& state) {
  GrinderParams p;
  p.volume_floor = 0.01;
  p.eta = p.gamma = 0.1;
  GrinderContinuous learner(p, make_oracle(OracleConfig{OracleKind::Exact, 0.0, 5000, {}}, false));
  const AgentModel model = AgentModel::indicator(0.1);
  Rng rng(2);
  auto round = [&] {
    const LabeledPoint sigma = gaussian_draw(rng, GaussianParams{});
    const Vector a = learner.select(rng);
    return learner.update(best_response(a, sigma, model), sigma, model, rng);
  };
  for (int i = 0; i < state.range(0); ++i) round();
  for (auto _ : state) benchmark::DoNotOptimize(round());
  state.counters["cells"] = static_cast<double>(learner.regions().size());
}
BENCHMARK(BM_GrinderContinuousRound)->Arg(0)->Arg(20)->Iterations(20)->Unit(benchmark::kMillisecond);

}  // namespace
