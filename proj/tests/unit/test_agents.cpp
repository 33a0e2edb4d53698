#include <doctest.h>

#include <random>

#include "grinder/agents.hpp"
#include "grinder/error.hpp"
#include "oracles.hpp"

using namespace grinder;
using oracle::v;

namespace {

LabeledPoint pt(double a, double b, Label y) { return {v({a, b}), y}; }

Vector random_action(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return v({u(rng), u(rng), u(rng)});
}

}  // namespace

TEST_CASE("indicator best response on the four-point instance") {
  const Vector h = v({1, 1, -1});
  const auto model = AgentModel::indicator(0.1);
  CHECK(best_response(h, pt(0.8, 0.9, Label::Positive), model).isApprox(v({0.8, 0.9})));

  const Vector r = best_response(h, pt(0.4, 0.5, Label::Negative), model);
  CHECK((r - v({0.45, 0.55})).norm() < 1e-12);
  CHECK(score(h, r) >= 0.0);
  // Hand-derived projection agrees.
  CHECK((r - oracle::indicator_response(h, v({0.4, 0.5}), 0.1, 0.1)).norm() < 1e-12);
}

TEST_CASE("truthful agents never move") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vector a = random_action(rng);
    const auto sigma = pt(uniform01(rng), uniform01(rng), Label::Negative);
    CHECK(best_response(a, sigma, AgentModel::truthful()) == sigma.x);
    CHECK(brute_force_best_response(a, sigma, AgentModel::truthful(), 0.01) == sigma.x);
  }
}

TEST_CASE("a hyperplane beyond the radius leaves the report unchanged") {
  const Vector far = v({1, 1, -1.5});
  const auto sigma = pt(0.3, 0.3, Label::Negative);
  const auto model = AgentModel::indicator(0.1);
  CHECK(best_response(far, sigma, model) == sigma.x);
  CHECK(brute_force_best_response(far, sigma, model, 0.005) == sigma.x);
}

TEST_CASE("best response against the brute-force grid") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  const double step = 0.005;
  for (const auto& model : {AgentModel::indicator(0.1), AgentModel::linear(0.1), AgentModel::adversarial(0.1)}) {
    int checked = 0;
    for (int i = 0; i < 150; ++i) {
      const Vector a = random_action(rng);
      const LabeledPoint sigma = pt(u(rng), u(rng), uniform01(rng) < 0.5 ? Label::Positive : Label::Negative);
      const Vector r = best_response(a, sigma, model);
      const Vector b = brute_force_best_response(a, sigma, model, step);
      CHECK((r - sigma.x).norm() <= model.delta + 1e-9);
      CHECK(utility(a, sigma, model, r) >= utility(a, sigma, model, sigma.x) - 1e-12);
      // A grid maximizer can beat the exact one only by discretization slack.
      CHECK(utility(a, sigma, model, r) >= utility(a, sigma, model, b) - 1e-9);
      if (model.family == AgentFamily::IndicatorValue) {
        // Independent grid search from the test oracles.
        const Vector g = oracle::grid_best_response(sigma.x, model.delta, step, [&](const oracle::Vec& z) {
          return oracle::indicator_utility(a, sigma.x, z, model.value_coeff);
        });
        // Near the hyperplane the grid's closest crossing point can sit off the
        // projection by sqrt(2 d* step + step^2), d* the distance to the plane.
        const double dist = std::abs(score(a, sigma.x)) / a.head(2).norm();
        const double slack = std::sqrt(2.0 * dist * step + step * step) + step;
        // When the crossing cap of the ball is thinner than sqrt(2) step it may
        // hold no grid point, and the grid search stays put.
        const double cap = model.delta - dist;
        if (g == sigma.x && cap >= 0.0 && cap < std::sqrt(2.0) * step) continue;
        CHECK((r - g).norm() <= slack);
        ++checked;
      }
    }
    if (model.family == AgentFamily::IndicatorValue) CHECK(checked >= 140);
  }
}

TEST_CASE("indicator response matches the hand-derived projection") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  for (int i = 0; i < 500; ++i) {
    const Vector a = random_action(rng);
    const Vector x = v({u(rng), u(rng)});
    const Vector expect = oracle::indicator_response(a, x, 0.1, 0.1);
    if (expect.minCoeff() < 0.0 || expect.maxCoeff() > 1.0) continue;
    CHECK((best_response(a, {x, Label::Negative}, AgentModel::indicator(0.1)) - expect).norm() < 1e-9);
  }
}

TEST_CASE("binary loss") {
  const Vector h = v({1, 1, -1});
  CHECK(binary_loss(h, v({0.8, 0.9}), Label::Positive) == 0);
  CHECK(binary_loss(h, v({0.6, 0.6}), Label::Negative) == 1);
  CHECK(binary_loss(h, v({0.5, 0.5}), Label::Positive) == 0);
  // A boundary report is classified +1, so it is a mistake on a negative label.
  CHECK(binary_loss(h, v({0.5, 0.5}), Label::Negative) == 1);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const Vector a = random_action(rng);
    const Vector z = v({uniform01(rng), uniform01(rng)});
    for (Label y : {Label::Positive, Label::Negative}) CHECK(binary_loss(a, z, y) == oracle::loss(a, z, sign(y)));
  }
}

TEST_CASE("hinge loss reproduces the non-convexity counterexample") {
  const Vector h = v({1, 1, -1});
  const Vector hp = v({0.5, -1, 0.25});
  const Vector hb = 0.5 * h + 0.5 * hp;
  CHECK(hb.isApprox(v({0.75, 0, -0.375})));
  const Vector hb_scaled = v({1, 0, -0.5});
  const Vector x = v({0.55, 0.4});

  const double lb = hinge_loss(hb_scaled, x, Label::Positive);
  const double lh = hinge_loss(h, v({0.61, 0.4}), Label::Positive);
  const double lp = hinge_loss(hp, x, Label::Positive);
  CHECK(lb == doctest::Approx(0.95));
  CHECK(lh == doctest::Approx(0.99));
  CHECK(lp == doctest::Approx(0.875));
  CHECK(lb > 0.5 * lh + 0.5 * lp);
  CHECK(hinge_loss(hb_scaled, v({0.61, 0.4}), Label::Positive) == doctest::Approx(0.89));

  CHECK(hinge_loss(v({1, 0, 0}), v({1, 0}), Label::Positive) == 0.0);
  CHECK(hinge_loss(v({1, 0, -0.5}), v({0.5, 0}), Label::Positive) == 1.0);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(AgentModel::indicator(0.0).validate(), ConfigError);
  CHECK_THROWS_AS(AgentModel::indicator(1.5).validate(), ConfigError);
  CHECK_NOTHROW(AgentModel::truthful().validate());
  CHECK(agent_family_from_string(to_string(AgentFamily::LinearValue)) == AgentFamily::LinearValue);
  CHECK_THROWS_AS(agent_family_from_string("nope"), ConfigError);
}

TEST_CASE("closeness of maxima for the strongly concave utility") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double step = 0.01;
  for (int i = 0; i < 30; ++i) {
    const Vector a = v({u(rng), u(rng)});
    const Vector b = v({u(rng), u(rng)});
    const Vector x = v({uniform01(rng), uniform01(rng)});
    const Vector ra = grid_argmax(2, step, [&](const Vector& z) { return quadratic_utility(a, x, z); });
    const Vector rb = grid_argmax(2, step, [&](const Vector& z) { return quadratic_utility(b, x, z); });
    CHECK((ra - rb).norm() <= (a - b).norm() / 2.0 + 2.0 * step * std::sqrt(2.0) + 1e-12);
  }
}

TEST_CASE("min-cost crossing lands on the requested side") {
  const Vector h = v({1, 1, -1});
  auto z = min_cost_crossing(h, v({0.2, 0.2}), true);
  REQUIRE(z);
  CHECK(score(h, *z) >= -1e-12);
  CHECK((*z - v({0.5, 0.5})).norm() < 1e-9);
  CHECK_FALSE(min_cost_crossing(v({1, 1, -3}), v({0.2, 0.2}), true));
}
