#include <doctest.h>

#include <random>

#include "grinder/error.hpp"
#include "grinder/oracle.hpp"
#include "oracles.hpp"

using namespace grinder;
using oracle::v;

namespace {

class Constant final : public InProbOracle {
 public:
  explicit Constant(double value) : value_(value) {}
  std::string_view name() const override { return "constant"; }
  std::vector<double> evaluate(const OracleQuery& q, Rng&) override {
    return std::vector<double>(q.target_count(), value_);
  }

 private:
  double value_;
};

std::vector<Vector> random_actions(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(v({u(rng), u(rng), u(rng)}));
  return out;
}

std::vector<double> uniform_pi(std::size_t k) { return std::vector<double>(k, 1.0 / static_cast<double>(k)); }

}  // namespace

TEST_CASE("blind band and update tests") {
  CHECK(blind_band(2, 0.1) == doctest::Approx(4.0 * std::sqrt(2.0) * 0.1));
  CHECK(action_updated(v({1, 0, 0}), v({0.5, 0.2}), 0.5));
  CHECK_FALSE(action_updated(v({1, 0, 0}), v({0.4, 0.2}), 0.5));
}

TEST_CASE("exact discrete oracle against a direct count") {
  const auto actions = random_actions(12, 4);
  std::vector<double> pi(12);
  std::mt19937_64 rng(5);
  double total = 0.0;
  for (double& p : pi) total += p = uniform01(rng) + 0.1;
  for (double& p : pi) p /= total;

  const AgentModel model = AgentModel::indicator(0.1);
  const double c = 0.05;
  for (int trial = 0; trial < 40; ++trial) {
    const LabeledPoint sigma{v({0.2 + 0.6 * uniform01(rng), 0.2 + 0.6 * uniform01(rng)}), Label::Negative};
    OracleQuery q;
    q.actions = &actions;
    q.pi = &pi;
    q.sigma = &sigma;
    q.model = &model;
    q.threshold = c;
    for (std::size_t j = 0; j < actions.size(); ++j) q.target_actions.push_back(j);
    ExactDiscreteOracle exact;
    Rng r(0);
    const auto got = exact.evaluate(q, r);
    for (std::size_t j = 0; j < actions.size(); ++j) {
      double expect = 0.0;
      for (std::size_t i = 0; i < actions.size(); ++i) {
        const auto rep = oracle::indicator_response(actions[i], sigma.x, 0.1, 0.1);
        if (i == j || std::abs(oracle::score(actions[j], rep)) >= c) expect += pi[i];
      }
      CHECK(got[j] == doctest::Approx(std::min(1.0, expect)).epsilon(1e-12));
      CHECK(got[j] >= pi[j] - 1e-15);
      CHECK(got[j] <= 1.0);
    }
  }
}

TEST_CASE("exact continuous oracle against independent Monte Carlo") {
  // Two cells of [-1,1]^3 and one target: the upper cell.
  const Halfspace cut = Halfspace::make(v({0.2, 0.3, 1.0}), 0.1);
  const auto split = Polytope::cube(3).split(cut);
  REQUIRE(split.inside);
  REQUIRE(split.outside);
  const std::vector<Polytope> regions{*split.inside, *split.outside};
  const std::vector<double> pi{0.3, 0.7};
  const AgentModel model = AgentModel::indicator(0.2);
  const LabeledPoint sigma{v({0.45, 0.5}), Label::Negative};
  const double c = 0.05;

  const auto updated = [&](const Polytope& target, const Vector& report) {
    bool up = true, down = true;
    for (const auto& w : target.vertices()) {
      const double s = oracle::score(w, report);
      up = up && s >= c;
      down = down && s <= -c;
    }
    return up || down;
  };

  for (std::size_t t = 0; t < regions.size(); ++t) {
    OracleQuery q;
    q.regions = &regions;
    q.pi = &pi;
    q.target_regions = {&regions[t]};
    q.sigma = &sigma;
    q.model = &model;
    q.threshold = c;
    q.chosen = 0;
    q.chosen_action = regions[0].vertex_centroid();
    ExactContinuousOracle exact(200'000);
    Rng r(1);
    const double got = exact.evaluate(q, r)[0];

    // Independent estimate: rejection from the cube, hand-derived responses.
    std::mt19937_64 g(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 200'000;
    double hits = 0.0;
    int drawn[2] = {0, 0};
    double cell_hits[2] = {0, 0};
    for (int i = 0; i < n; ++i) {
      const Vector w = v({u(g), u(g), u(g)});
      const int cell = cut.slack(w) <= 0 ? 0 : 1;
      ++drawn[cell];
      const Vector rep = oracle::indicator_response(w, sigma.x, 0.2, 0.2);
      cell_hits[cell] += updated(regions[t], rep) ? 1.0 : 0.0;
    }
    for (int s = 0; s < 2; ++s) hits += pi[s] * cell_hits[s] / drawn[s];
    CHECK(std::abs(got - hits) < 0.01);
  }
}

TEST_CASE("noisy wrapper") {
  OracleQuery q;
  q.target_actions = {0, 1, 2};
  std::vector<Vector> actions(3, v({1, 0, 0}));
  q.actions = &actions;
  Rng rng(3);

  NoisyOracle identity(std::make_unique<Constant>(0.5), 0.0);
  for (double x : identity.evaluate(q, rng)) CHECK(x == 0.5);

  NoisyOracle noisy(std::make_unique<Constant>(0.5), 0.1);
  for (int i = 0; i < 1000; ++i)
    for (double x : noisy.evaluate(q, rng)) {
      CHECK(x >= 0.45);
      CHECK(x <= 0.55);
    }
  CHECK(noisy.band_violations() == 0);
  CHECK(noisy.calls() == 3000);

  CHECK_THROWS_AS(NoisyOracle(std::make_unique<Constant>(0.5), 0.6), ConfigError);
  OracleConfig cfg;
  cfg.kind = OracleKind::Noisy;
  cfg.epsilon = 0.7;
  CHECK_THROWS_AS(make_oracle(cfg, true), ConfigError);
}

TEST_CASE("logistic oracle: crude bound, learning and the self floor") {
  const auto actions = random_actions(6, 9);
  const auto pi = uniform_pi(actions.size());
  LogisticOracle logistic;
  OracleQuery q;
  q.actions = &actions;
  q.pi = &pi;
  q.threshold = 0.1;
  q.report = v({0.5, 0.5});
  for (std::size_t j = 0; j < actions.size(); ++j) q.target_actions.push_back(j);
  Rng rng(0);

  const auto first = logistic.evaluate(q, rng);
  for (std::size_t j = 0; j < actions.size(); ++j) CHECK(first[j] == doctest::Approx(LogisticOracle::crude_bound(q, j)));

  // A history where every action is always updated: large scores on every report.
  const std::vector<Vector> loud(actions.size(), v({0, 0, 1}));
  OracleQuery hist = q;
  hist.actions = &loud;
  std::vector<double> last;
  for (int t = 0; t < 50; ++t) {
    hist.chosen = static_cast<std::size_t>(t) % loud.size();
    hist.chosen_action = loud[hist.chosen];
    hist.report = v({uniform01(rng), uniform01(rng)});
    last = logistic.evaluate(hist, rng);
    logistic.observe(hist);
  }
  last = logistic.evaluate(hist, rng);
  for (double x : last) CHECK(x >= 0.9);

  for (std::size_t j = 0; j < actions.size(); ++j) CHECK(logistic.evaluate(q, rng)[j] >= pi[j]);
}

TEST_CASE("fit_logistic separates a one-dimensional threshold") {
  const int n = 200;
  Eigen::MatrixXd x(n, 2);
  Eigen::MatrixXd y(n, 1);
  for (int i = 0; i < n; ++i) {
    const double t = -1.0 + 2.0 * i / (n - 1);
    x(i, 0) = 1.0;
    x(i, 1) = t;
    y(i, 0) = t > 0 ? 1.0 : 0.0;
  }
  LogisticSettings s;
  s.iterations = 2000;
  s.step = 1.0;
  const auto w = fit_logistic(x, y, Eigen::VectorXd::Ones(n), Eigen::MatrixXd::Zero(2, 1), s);
  CHECK(w(1, 0) > 0.0);
  CHECK(std::abs(w(0, 0)) < 0.5 * w(1, 0));
}

TEST_CASE("oracle names round-trip") {
  for (auto k : {OracleKind::Exact, OracleKind::Noisy, OracleKind::Logistic})
    CHECK(oracle_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(oracle_kind_from_string("psychic"), ConfigError);
}
