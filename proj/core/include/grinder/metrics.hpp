#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "grinder/agents.hpp"

namespace grinder {

struct LedgerEntry {
  Vector action;
  Vector report;
  LabeledPoint sigma;
  int loss = 0;
};

/// Everything needed to recompute both regret notions after a run.
class RegretLedger {
 public:
  void record(const Vector& action, const Vector& report, const LabeledPoint& sigma, int loss);
  void record(const Vector& action, const Vector& report, const LabeledPoint& sigma);

  std::size_t size() const { return entries_.size(); }
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  double cumulative_loss() const;

 private:
  std::vector<LedgerEntry> entries_;
};

/// Realized loss minus the best candidate's loss on the recorded reports.
double external_regret(const RegretLedger& ledger, const std::vector<Vector>& candidates);

/// Realized loss minus the best candidate's loss had the agents best-responded to it.
double stackelberg_regret(const RegretLedger& ledger, const std::vector<Vector>& candidates, const AgentModel& model);

/// Regret after each prefix 1..T, with the best candidate chosen per prefix.
std::vector<double> external_regret_curve(const RegretLedger& ledger, const std::vector<Vector>& candidates);
std::vector<double> stackelberg_regret_curve(const RegretLedger& ledger, const std::vector<Vector>& candidates,
                                             const AgentModel& model);
std::vector<double> cumulative_loss_curve(const RegretLedger& ledger);

struct SummaryStats {
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

/// Linear interpolation between order statistics (q in [0, 1]).
double percentile(std::vector<double> values, double q);
SummaryStats summarize(const std::vector<double>& values);

// ------------------------------------------------------------ finite games

enum class GameClass { PurelyAdversarial, PurelyCooperative, Unclassified };

std::string_view to_string(GameClass c);

/// Finite repeated Stackelberg game. table[m][a][b] is the learner's loss when
/// it plays a against an agent of type m who responds as if it had seen b.
struct FiniteGame {
  std::vector<std::vector<std::vector<double>>> table;

  std::size_t actions() const { return table.empty() ? 0 : table.front().size(); }
  std::size_t types() const { return table.size(); }
  double loss(std::size_t type, std::size_t played, std::size_t responded_to) const {
    return table[type][played][responded_to];
  }

  /// Builds the table from per-type learner and agent losses over responses:
  /// each agent type answers action a with a response minimizing its own loss
  /// (lowest index on ties).
  static FiniteGame from_responses(const std::vector<std::vector<std::vector<double>>>& learner_loss,
                                   const std::vector<std::vector<std::vector<double>>>& agent_loss);
};

GameClass classify(const FiniteGame& game);

struct HierarchyReport {
  GameClass game_class = GameClass::Unclassified;
  double external = 0.0;
  double stackelberg = 0.0;
  /// False only when a classified game violates its inequality.
  bool consistent = true;
};

/// Both regrets of the played sequence (action, agent type) by enumeration.
HierarchyReport hierarchy_check(const FiniteGame& game, const std::vector<std::pair<std::size_t, std::size_t>>& sequence);

}  // namespace grinder
