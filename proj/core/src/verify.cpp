#include "grinder/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <nlohmann/json.hpp>

#include "grinder/agents.hpp"
#include "grinder/baselines.hpp"
#include "grinder/environments.hpp"
#include "grinder/error.hpp"
#include "grinder/geometry.hpp"
#include "grinder/grinder.hpp"
#include "grinder/harness.hpp"
#include "grinder/metrics.hpp"

namespace grinder {

namespace {

VerifyCheck within(std::string name, double measured, double expected, double tol) {
  return {std::move(name), measured, expected, tol, std::abs(measured - expected) <= tol};
}

VerifyCheck at_most(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, 0.0, measured <= bound};
}

VerifyCheck at_least(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, 0.0, measured >= bound};
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

VerifyReport theorem1() {
  VerifyReport r{"theorem1", {}};
  const Vector h = Theorem1Instance::h(), hp = Theorem1Instance::h_prime();
  const AgentModel m = AgentModel::indicator(0.1);
  Rng rng(20240601);
  const int n = 100'000;
  double hh = 0, hphp = 0, h_hp = 0, hp_h = 0;
  for (int i = 0; i < n; ++i) {
    const LabeledPoint s = theorem1_draw(rng);
    const Vector rh = best_response(h, s, m), rhp = best_response(hp, s, m);
    hh += binary_loss(h, rh, s.y);
    hphp += binary_loss(hp, rhp, s.y);
    h_hp += binary_loss(h, rhp, s.y);
    hp_h += binary_loss(hp, rh, s.y);
  }
  r.checks.push_back(within("E[l(h, r(h))]", hh / n, 0.20, 0.01));
  r.checks.push_back(within("E[l(h', r(h'))]", hphp / n, 0.25, 0.01));
  r.checks.push_back(within("E[l(h, r(h'))]", h_hp / n, 0.90, 0.01));
  r.checks.push_back(within("E[l(h', r(h))]", hp_h / n, 0.05, 0.01));
  return r;
}

VerifyReport incompatibility() {
  VerifyReport r{"incompatibility", {}};
  const std::vector<Vector> cands{Theorem1Instance::h(), Theorem1Instance::h_prime()};
  const AgentModel m = AgentModel::indicator(0.1);
  const std::size_t t_max = 10'000;
  for (int which = 0; which < 2; ++which) {
    Rng rng(77 + which);
    RegretLedger ledger;
    for (std::size_t t = 0; t < t_max; ++t) {
      const LabeledPoint s = theorem1_draw(rng);
      ledger.record(cands[which], best_response(cands[which], s, m), s);
    }
    if (which == 0)
      r.checks.push_back(at_least("external regret / T, all-h", external_regret(ledger, cands) / t_max, 0.14));
    else
      r.checks.push_back(at_least("stackelberg regret / T, all-h'", stackelberg_regret(ledger, cands, m) / t_max, 0.04));
  }
  return r;
}

VerifyReport geometry() {
  VerifyReport r{"geometry", {}};
  r.checks.push_back(within("cube volume", volume(Polytope::cube(3)), 8.0, 1e-9));
  std::vector<Halfspace> simplex{Halfspace::make(vec({-1, 0, 0}), 0), Halfspace::make(vec({0, -1, 0}), 0),
                                 Halfspace::make(vec({0, 0, -1}), 0), Halfspace::make(vec({1, 1, 1}), 1)};
  r.checks.push_back(within("simplex volume", volume(Polytope::from_halfspaces(3, simplex)), 1.0 / 6.0, 1e-9));
  const auto half = Polytope::cube(3).split(Halfspace::make(vec({1, 0, 0}), 0));
  r.checks.push_back(within("half-cube volume", half.inside ? volume(*half.inside) : 0.0, 4.0, 1e-9));

  Rng rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Polytope p = Polytope::cube(3);
    const Halfspace h = Halfspace::make(vec({g(rng), g(rng), g(rng)}), u(rng));
    const auto s = p.split(h);
    const double parts = (s.inside ? volume(*s.inside) : 0.0) + (s.outside ? volume(*s.outside) : 0.0);
    worst = std::max(worst, std::abs(parts - 8.0));
  }
  r.checks.push_back(at_most("worst additivity error over 1000 random cuts", worst, 1e-9));
  return r;
}

// Exact probability that a uniform draw from `p` lands in the box [lo, hi].
double box_fraction(const Polytope& p, const Vector& lo, const Vector& hi) {
  std::optional<Polytope> cur = p;
  for (Eigen::Index k = 0; k < lo.size() && cur; ++k) {
    Vector e = Vector::Zero(lo.size());
    e(k) = 1.0;
    cur = intersect_halfspace(*cur, Halfspace::make(e, hi(k)));
    if (cur) cur = intersect_halfspace(*cur, Halfspace::make(-e, -lo(k)));
  }
  return cur && cur->full_dimensional() ? volume(*cur) / volume(p) : 0.0;
}

VerifyReport sampling() {
  VerifyReport r{"sampling", {}};
  const auto first = Polytope::cube(3).split(Halfspace::make(vec({1, 1, 0}), 0.3));
  const auto second = first.inside->split(Halfspace::make(vec({0, -1, 1}), -0.2));
  std::vector<Polytope> cells{*first.outside, *second.inside, *second.outside};
  GrinderParams params;
  params.eta = 0.5;
  params.gamma = 0.2;
  GrinderContinuous learner(params, std::make_unique<ExactContinuousOracle>());
  learner.set_state(cells, {0.0, 1.0, 2.5});
  const auto pi = learner.sampling_distribution();

  const int bins = 3;
  auto bin_of = [&](const Vector& w) {
    int idx = 0;
    for (int k = 0; k < 3; ++k) idx = idx * bins + std::clamp(static_cast<int>((w(k) + 1.0) / 2.0 * bins), 0, bins - 1);
    return idx;
  };
  std::vector<double> exact(bins * bins * bins, 0.0);
  for (int b = 0; b < bins * bins * bins; ++b) {
    Vector lo(3), hi(3);
    for (int k = 2, rest = b; k >= 0; --k, rest /= bins) {
      lo(k) = -1.0 + 2.0 * (rest % bins) / bins;
      hi(k) = lo(k) + 2.0 / bins;
    }
    for (std::size_t s = 0; s < cells.size(); ++s) exact[b] += pi[s] * box_fraction(cells[s], lo, hi);
  }
  Rng rng(11);
  const int n = 100'000;
  std::vector<double> counts(exact.size(), 0.0);
  for (int i = 0; i < n; ++i) counts[bin_of(learner.select(rng))] += 1.0;
  double tv = 0.0, mass = 0.0;
  for (std::size_t b = 0; b < exact.size(); ++b) {
    tv += std::abs(counts[b] / n - exact[b]);
    mass += exact[b];
  }
  r.checks.push_back(within("exact bin mass", mass, 1.0, 1e-9));
  r.checks.push_back(at_most("total variation, 27 bins, 1e5 draws", 0.5 * tv, 0.02));
  return r;
}

VerifyReport estimator() {
  VerifyReport r{"estimator", {}};
  const AgentModel model = AgentModel::indicator(0.05);
  LabeledPoint sigma{vec({0.45, 0.55}), Label::Negative};
  GrinderParams params;
  params.delta = model.delta;
  params.eta = 0.2;
  params.gamma = 0.3;
  Rng pick(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> actions(10, Vector(3));
  for (auto& a : actions) a << u(pick), u(pick), u(pick);
  std::vector<double> frozen(10);
  for (auto& l : frozen) l = 3.0 * (u(pick) + 1.0);

  GrinderDiscrete learner(actions, params, std::make_unique<ExactDiscreteOracle>());
  learner.set_cumulative_losses(frozen);
  Rng rng(8);
  const int n = 100'000;
  std::vector<double> mean(10, 0.0);
  for (int i = 0; i < n; ++i) {
    learner.select(rng);
    const std::size_t chosen = learner.chosen();
    const auto est = learner.estimate(chosen, best_response(actions[chosen], sigma, model), sigma, model, rng);
    for (std::size_t j = 0; j < 10; ++j) mean[j] += est.estimates[j] / n;
  }
  for (std::size_t j = 0; j < 10; ++j) {
    const double truth = binary_loss(actions[j], best_response(actions[j], sigma, model), sigma.y);
    r.checks.push_back(within("mean estimate of action " + std::to_string(j), mean[j], truth, 0.02));
  }
  return r;
}

ExperimentConfig small_config(ActionMode mode, std::size_t horizon) {
  ExperimentConfig c;
  c.horizon = horizon;
  c.repetitions = 1;
  c.action_set.mode = mode;
  c.action_set.size = 20;
  c.learners = {LearnerConfig{}};
  c.learners[0].oracle.mc_samples = 4000;
  return c;
}

VerifyReport second_order() {
  VerifyReport r{"second-order", {}};
  for (auto mode : {ActionMode::Discrete, ActionMode::Continuous}) {
    const ExperimentConfig c = small_config(mode, mode == ActionMode::Discrete ? 300 : 20);
    const auto actions = build_action_set(c);
    const RunOutcome run = run_single(c, 0, 0, actions, {});
    const std::string tag = mode == ActionMode::Discrete ? "discrete" : "continuous";
    r.checks.push_back(at_most(tag + " lhs - rhs", run.second_order->lhs() - run.second_order->rhs(), 1e-6));
  }
  return r;
}

VerifyReport partition() {
  VerifyReport r{"partition", {}};
  const ExperimentConfig c = small_config(ActionMode::Continuous, 20);
  const RunOutcome run = run_single(c, 0, 0, {}, {});
  double worst = -INFINITY;
  for (std::size_t t = 0; t < run.rounds.size(); ++t)
    worst = std::max(worst, static_cast<double>(run.rounds[t].partition_size) - partition_bound(c.dimension, t + 1));
  r.checks.push_back(at_most("max over t of |P_t| - bound", worst, 0.0));
  r.checks.push_back(at_least("rounds completed", static_cast<double>(run.rounds.size()), 20.0));
  return r;
}

FiniteGame random_game(Rng& rng, std::size_t k, std::size_t m, GameClass cls) {
  std::uniform_int_distribution<int> entry(-5, 5), bump(0, 2);
  FiniteGame g;
  g.table.assign(m, std::vector<std::vector<double>>(k, std::vector<double>(k)));
  for (auto& tm : g.table)
    for (std::size_t a = 0; a < k; ++a) {
      for (auto& v : tm[a]) v = entry(rng);
      const auto [lo, hi] = std::minmax_element(tm[a].begin(), tm[a].end());
      tm[a][a] = cls == GameClass::PurelyAdversarial ? *hi + bump(rng) : *lo - bump(rng);
    }
  return g;
}

VerifyReport hierarchy() {
  VerifyReport r{"hierarchy", {}};
  FiniteGame example;
  example.table = {{{7, 6}, {6, 7}}};
  r.checks.push_back(within("example table is PASG", classify(example) == GameClass::PurelyAdversarial, 1.0, 0.0));

  Rng rng(99);
  double games = 0, violations = 0, misclassified = 0, sequences = 0;
  for (auto cls : {GameClass::PurelyAdversarial, GameClass::PurelyCooperative}) {
    for (int i = 0; i < 100; ++i) {
      const std::size_t k = 2 + i % 2, m = 2;
      const FiniteGame g = random_game(rng, k, m, cls);
      games += 1;
      if (classify(g) != cls) misclassified += 1;
      const std::size_t cells = k * m;
      for (std::size_t len = 1; len <= 6; ++len) {
        std::size_t total = 1;
        for (std::size_t q = 0; q < len; ++q) total *= cells;
        std::vector<std::pair<std::size_t, std::size_t>> seq(len);
        for (std::size_t code = 0; code < total; ++code) {
          for (std::size_t q = 0, rest = code; q < len; ++q, rest /= cells) seq[q] = {rest % cells % k, rest % cells / k};
          sequences += 1;
          if (!hierarchy_check(g, seq).consistent) violations += 1;
        }
      }
    }
  }
  r.checks.push_back(within("games checked", games, 200.0, 0.0));
  r.checks.push_back(within("misclassified games", misclassified, 0.0, 0.0));
  r.checks.push_back(at_least("sequences enumerated", sequences, 1.0));
  r.checks.push_back(within("violations", violations, 0.0, 0.0));
  return r;
}

// Grid maximizer of <a, z> - |x - z|^2 over {k * step}^d; the utility is a
// sum over coordinates, so each coordinate is searched on its own.
Vector separable_grid_argmax(const Vector& a, const Vector& x, double step) {
  const int n = static_cast<int>(1.0 / step + 0.5);
  Vector z(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    double best = -INFINITY;
    for (int i = 0; i <= n; ++i) {
      const double zi = std::min(1.0, i * step);
      const double v = a(k) * zi - (x(k) - zi) * (x(k) - zi);
      if (v > best) {
        best = v;
        z(k) = zi;
      }
    }
  }
  return z;
}

VerifyReport closeness() {
  VerifyReport r{"closeness", {}};
  Rng rng(2718);
  std::uniform_real_distribution<double> ua(-1.0, 1.0), ux(0.0, 1.0);
  const double step = 1e-3;
  const int d = 2;
  double worst = -INFINITY;
  for (int i = 0; i < 500; ++i) {
    const Vector a = vec({ua(rng), ua(rng)}), b = vec({ua(rng), ua(rng)}), x = vec({ux(rng), ux(rng)});
    const double gap = (separable_grid_argmax(a, x, step) - separable_grid_argmax(b, x, step)).norm();
    worst = std::max(worst, gap - ((a - b).norm() / 2.0 + 2.0 * step * std::sqrt(d)));
  }
  r.checks.push_back(at_most("max excess of |r(a) - r(b)| over the bound", worst, 0.0));
  return r;
}

VerifyReport lower_bound() {
  VerifyReport r{"lower-bound", {}};
  ExperimentConfig c;
  c.stream.kind = StreamKind::LowerBound;
  c.horizon = 2500;
  c.repetitions = 10;
  c.action_set.size = 20;
  c.learners.assign(2, LearnerConfig{});
  c.learners[1].kind = LearnerKind::Exp3;
  const auto actions = build_action_set(c);
  for (std::size_t l = 0; l < 2; ++l) {
    double mean = 0.0;
    for (std::size_t rep = 0; rep < c.repetitions; ++rep)
      mean += run_single(c, rep, l, actions, actions).external_regret.back() / c.repetitions;
    r.checks.push_back(at_least(c.learner_labels()[l] + " mean regret / sqrt(T)", mean / std::sqrt(c.horizon), 0.05));
  }
  return r;
}

VerifyReport noisy_oracle() {
  VerifyReport r{"oracle", {}};
  const double eps = 0.1;
  NoisyOracle noisy(std::make_unique<ExactDiscreteOracle>(), eps);
  ExactDiscreteOracle exact;
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> actions(10, Vector(3));
  for (auto& a : actions) a << u(rng), u(rng), u(rng);
  const std::vector<double> pi(10, 0.1);
  const AgentModel m = AgentModel::indicator(0.1);
  const LabeledPoint s{vec({0.3, 0.7}), Label::Positive};
  OracleQuery q;
  q.actions = &actions;
  q.pi = &pi;
  q.sigma = &s;
  q.model = &m;
  q.report = best_response(actions[0], s, m);
  q.threshold = blind_band(2, 0.1);
  for (std::size_t j = 0; j < 10; ++j) q.target_actions.push_back(j);
  const auto truth = exact.evaluate(q, rng);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto v = noisy.evaluate(q, rng);
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[j] < 1.0) worst = std::max(worst, std::abs(v[j] / truth[j] - 1.0));
  }
  r.checks.push_back(at_most("worst relative deviation", worst, eps));
  r.checks.push_back(within("band violations", static_cast<double>(noisy.band_violations()), 0.0, 0.0));
  return r;
}

const std::map<std::string, std::function<VerifyReport()>, std::less<>>& registry() {
  static const std::map<std::string, std::function<VerifyReport()>, std::less<>> suites{
      {"closeness", closeness},     {"estimator", estimator}, {"geometry", geometry},
      {"hierarchy", hierarchy},     {"incompatibility", incompatibility},
      {"lower-bound", lower_bound}, {"oracle", noisy_oracle}, {"partition", partition},
      {"sampling", sampling},       {"second-order", second_order}, {"theorem1", theorem1}};
  return suites;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["passed"] = passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name}, {"measured", c.measured}, {"expected", c.expected},
                           {"tolerance", c.tolerance}, {"passed", c.passed}});
  return j.dump(2);
}

std::vector<std::string> list_suites() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

VerifyReport verify_suite(std::string_view name) {
  const auto& suites = registry();
  const auto it = suites.find(name);
  if (it == suites.end()) throw UnknownSuite("unknown suite '" + std::string(name) + "'");
  return it->second();
}

}  // namespace grinder
