#include "grinder/metrics.hpp"

#include <algorithm>
#include <limits>

#include "grinder/error.hpp"

namespace grinder {

namespace {

void require_candidates(const std::vector<Vector>& candidates) {
  if (candidates.empty()) throw ConfigError("regret needs at least one candidate action");
}

template <class LossOf>
std::vector<double> regret_curve(const RegretLedger& ledger, std::size_t n_candidates, LossOf&& loss_of) {
  std::vector<double> cum(n_candidates, 0.0);
  std::vector<double> curve;
  curve.reserve(ledger.size());
  double realized = 0.0;
  for (std::size_t t = 0; t < ledger.size(); ++t) {
    realized += ledger.entries()[t].loss;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_candidates; ++c) {
      cum[c] += loss_of(t, c);
      best = std::min(best, cum[c]);
    }
    curve.push_back(realized - best);
  }
  return curve;
}

}  // namespace

void RegretLedger::record(const Vector& action, const Vector& report, const LabeledPoint& sigma, int loss) {
  entries_.push_back({action, report, sigma, loss});
}

void RegretLedger::record(const Vector& action, const Vector& report, const LabeledPoint& sigma) {
  record(action, report, sigma, binary_loss(action, report, sigma.y));
}

double RegretLedger::cumulative_loss() const {
  double total = 0.0;
  for (const auto& e : entries_) total += e.loss;
  return total;
}

std::vector<double> external_regret_curve(const RegretLedger& ledger, const std::vector<Vector>& candidates) {
  require_candidates(candidates);
  return regret_curve(ledger, candidates.size(), [&](std::size_t t, std::size_t c) {
    const auto& e = ledger.entries()[t];
    return static_cast<double>(binary_loss(candidates[c], e.report, e.sigma.y));
  });
}

std::vector<double> stackelberg_regret_curve(const RegretLedger& ledger, const std::vector<Vector>& candidates,
                                             const AgentModel& model) {
  require_candidates(candidates);
  return regret_curve(ledger, candidates.size(), [&](std::size_t t, std::size_t c) {
    const auto& e = ledger.entries()[t];
    return static_cast<double>(binary_loss(candidates[c], best_response(candidates[c], e.sigma, model), e.sigma.y));
  });
}

std::vector<double> cumulative_loss_curve(const RegretLedger& ledger) {
  std::vector<double> curve;
  curve.reserve(ledger.size());
  double total = 0.0;
  for (const auto& e : ledger.entries()) curve.push_back(total += e.loss);
  return curve;
}

double external_regret(const RegretLedger& ledger, const std::vector<Vector>& candidates) {
  const auto curve = external_regret_curve(ledger, candidates);
  return curve.empty() ? 0.0 : curve.back();
}

double stackelberg_regret(const RegretLedger& ledger, const std::vector<Vector>& candidates, const AgentModel& model) {
  const auto curve = stackelberg_regret_curve(ledger, candidates, model);
  return curve.empty() ? 0.0 : curve.back();
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = values.empty() ? 0.0 : total / static_cast<double>(values.size());
  s.p10 = percentile(values, 0.1);
  s.p90 = percentile(values, 0.9);
  return s;
}

std::string_view to_string(GameClass c) {
  switch (c) {
    case GameClass::PurelyAdversarial: return "PASG";
    case GameClass::PurelyCooperative: return "PCSG";
    case GameClass::Unclassified: return "unclassified";
  }
  return "unclassified";
}

FiniteGame FiniteGame::from_responses(const std::vector<std::vector<std::vector<double>>>& learner_loss,
                                      const std::vector<std::vector<std::vector<double>>>& agent_loss) {
  FiniteGame game;
  for (std::size_t m = 0; m < learner_loss.size(); ++m) {
    const auto& lm = learner_loss[m];
    const auto& gm = agent_loss[m];
    const std::size_t k = lm.size();
    std::vector<std::size_t> response(k);
    for (std::size_t a = 0; a < k; ++a)
      response[a] = static_cast<std::size_t>(std::min_element(gm[a].begin(), gm[a].end()) - gm[a].begin());
    std::vector<std::vector<double>> table(k, std::vector<double>(k));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) table[a][b] = lm[a][response[b]];
    game.table.push_back(std::move(table));
  }
  return game;
}

GameClass classify(const FiniteGame& game) {
  bool adversarial = true, cooperative = true;
  for (const auto& tm : game.table)
    for (std::size_t a = 0; a < tm.size(); ++a)
      for (std::size_t b = 0; b < tm.size(); ++b) {
        adversarial = adversarial && tm[a][a] >= tm[a][b];
        cooperative = cooperative && tm[a][a] <= tm[a][b];
      }
  if (adversarial) return GameClass::PurelyAdversarial;
  if (cooperative) return GameClass::PurelyCooperative;
  return GameClass::Unclassified;
}

HierarchyReport hierarchy_check(const FiniteGame& game, const std::vector<std::pair<std::size_t, std::size_t>>& sequence) {
  HierarchyReport report;
  report.game_class = classify(game);
  const std::size_t k = game.actions();
  double realized = 0.0;
  std::vector<double> ext(k, 0.0), stack(k, 0.0);
  for (const auto& [played, type] : sequence) {
    realized += game.loss(type, played, played);
    for (std::size_t c = 0; c < k; ++c) {
      ext[c] += game.loss(type, c, played);
      stack[c] += game.loss(type, c, c);
    }
  }
  report.external = realized - *std::min_element(ext.begin(), ext.end());
  report.stackelberg = realized - *std::min_element(stack.begin(), stack.end());
  if (report.game_class == GameClass::PurelyAdversarial) report.consistent = report.stackelberg <= report.external + 1e-12;
  if (report.game_class == GameClass::PurelyCooperative) report.consistent = report.stackelberg >= report.external - 1e-12;
  return report;
}

}  // namespace grinder
