#include <doctest.h>

#include "grinder/environments.hpp"
#include "grinder/error.hpp"
#include "oracles.hpp"

using namespace grinder;
using oracle::v;

namespace {

bool in_box(const Vector& x, double lo, double hi) { return x.minCoeff() >= lo && x.maxCoeff() <= hi; }

}  // namespace

TEST_CASE("four-point instance") {
  const auto& s = Theorem1Instance::support();
  const auto& p = Theorem1Instance::probabilities();
  CHECK(s.size() == 4);
  CHECK(p[0] + p[1] + p[2] + p[3] == doctest::Approx(1.0));

  Rng rng(1);
  int x4 = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const auto sigma = theorem1_draw(rng);
    if (sigma.x.isApprox(v({0.65, 0.3}))) ++x4;
    if (sigma.x.isApprox(v({0.4, 0.5})) || sigma.x.isApprox(v({0.6, 0.6}))) CHECK(sigma.y == Label::Negative);
  }
  CHECK(std::abs(x4 / double(n) - 0.75) < 0.01);
}

TEST_CASE("gaussian stream") {
  Rng rng(2);
  double sum = 0.0;
  long count = 0;
  for (int i = 0; i < 100'000; ++i) {
    const auto s = gaussian_draw(rng, GaussianParams{});
    REQUIRE(in_box(s.x, 0.0, 1.0));
    if (s.y == Label::Positive) {
      sum += s.x.sum();
      count += 2;
    }
  }
  const double mean = sum / static_cast<double>(count);
  CHECK(mean >= 0.6);
  CHECK(mean <= 0.72);

  GaussianParams all_pos;
  all_pos.pos_prob = 1.0;
  for (int i = 0; i < 1000; ++i) CHECK(gaussian_draw(rng, all_pos).y == Label::Positive);

  const auto hard = GaussianParams::hard();
  CHECK(hard.pos_mean == std::vector<double>{0.6, 0.4});
  CHECK(hard.neg_mean == std::vector<double>{0.4, 0.6});

  GaussianParams bad;
  bad.pos_sd = {0.0};
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
}

TEST_CASE("spam mixture") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto a = spam_mixture_draw(rng, 1.0);
    CHECK(a.y == Label::Positive);
    CHECK(in_box(a.x, 0.4, 1.0));
    const auto b = spam_mixture_draw(rng, 0.0);
    CHECK(b.y == Label::Negative);
    CHECK(in_box(b.x, 0.0, 0.6));
  }
  int pos = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) pos += spam_mixture_draw(rng, 0.6).y == Label::Positive;
  CHECK(std::abs(pos / double(n) - 0.6) < 0.01);
}

TEST_CASE("lower-bound phases move the point by bisection") {
  Rng rng(4);
  LowerBoundEnvironment up(100, 2, Regime::U);
  CHECK(up.next(rng).x.isApprox(v({0.5, 0.5})));
  CHECK(up.kappa() == 1);
  for (int i = 1; i < 50; ++i) {
    up.next(rng);
    up.record_prediction(-1);  // a learner that always says -1 loses more under U
  }
  up.record_prediction(-1);
  CHECK(up.next(rng).x.isApprox(v({0.5, 5.0 / 8.0})));
  CHECK(up.kappa() == 3);

  LowerBoundEnvironment low(100, 2, Regime::L);
  for (int i = 0; i < 50; ++i) {
    low.next(rng);
    low.record_prediction(+1);
  }
  CHECK(low.next(rng).x.isApprox(v({0.5, 3.0 / 8.0})));
  CHECK(low.kappa() == 1);
}

TEST_CASE("lower-bound phases have fixed length and the kappa recurrence") {
  Rng rng(5);
  const std::size_t horizon = 1000;
  LowerBoundEnvironment env(horizon, 7, std::nullopt);
  CHECK(env.rounds_per_phase() == horizon / 7);
  long prev_kappa = 1;
  int prev_phase = -1;
  std::size_t in_phase = 0;
  for (std::size_t t = 0; t < env.rounds_per_phase() * 7; ++t) {
    const auto s = env.next(rng);
    CHECK(in_box(s.x, 0.0, 1.0));
    if (env.phase() != prev_phase) {
      if (prev_phase >= 0) {
        CHECK(in_phase == env.rounds_per_phase());
        CHECK((env.kappa() == 2 * prev_kappa + 1 || env.kappa() == 2 * prev_kappa - 1));
      }
      prev_phase = env.phase();
      prev_kappa = env.kappa();
      in_phase = 0;
    }
    ++in_phase;
    env.record_prediction(uniform01(rng) < 0.5 ? 1 : -1);
  }
  CHECK_THROWS_AS(env.next(rng), StreamExhausted);
}

TEST_CASE("lower-bound label bias") {
  Rng rng(6);
  const std::size_t n = 10'000;
  LowerBoundEnvironment env(n, 1, Regime::U);
  CHECK(env.epsilon() == doctest::Approx(1.0 / (3.0 * std::sqrt(2.0 * n))));
  int pos = 0;
  for (std::size_t i = 0; i < n; ++i) pos += env.next(rng).y == Label::Positive;
  CHECK(std::abs(pos / double(n) - (0.5 + env.epsilon())) < 0.01);
}

TEST_CASE("streams are reproducible from their seed") {
  StreamConfig cfg;
  for (auto kind : {StreamKind::Theorem1, StreamKind::Gaussian, StreamKind::SpamMixture, StreamKind::LowerBound}) {
    cfg.kind = kind;
    Stream a(cfg, 2, 200, 99), b(cfg, 2, 200, 99);
    for (int i = 0; i < 200; ++i) {
      const auto x = a.next();
      const auto y = b.next();
      CHECK(x.x == y.x);
      CHECK(x.y == y.y);
      a.record_prediction(1);
      b.record_prediction(1);
    }
  }
  CHECK(stream_kind_from_string("spam") == StreamKind::SpamMixture);
  CHECK_THROWS_AS(stream_kind_from_string("bogus"), ConfigError);
}
