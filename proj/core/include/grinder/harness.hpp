#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "grinder/config.hpp"
#include "grinder/grinder.hpp"
#include "grinder/learner.hpp"
#include "grinder/metrics.hpp"

namespace grinder {

/// Seed of repetition `rep`; stream and learner seeds are derived from it.
std::uint64_t repetition_seed(std::uint64_t master, std::size_t rep);

/// The agents actually faced: the lower-bound stream forces truthful reports.
AgentModel effective_agent(const ExperimentConfig& config);

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, std::size_t index, const std::vector<Vector>& actions);

struct RunOutcome {
  std::size_t repetition = 0;
  std::size_t learner = 0;
  std::string label;
  std::uint64_t seed = 0;

  RegretLedger ledger;
  std::vector<RoundDiagnostics> rounds;
  std::vector<double> wall_us;

  std::vector<double> cumulative_loss;
  std::vector<double> external_regret;     // empty without candidates
  std::vector<double> stackelberg_regret;  // empty without candidates
  std::optional<SecondOrderCheck> second_order;  // GRINDER only
  std::size_t max_partition = 0;

  bool partial = false;
  std::string stop_reason;
};

/// One (repetition, learner) pair. Deterministic given the config.
RunOutcome run_single(const ExperimentConfig& config, std::size_t repetition, std::size_t learner,
                      const std::vector<Vector>& actions, const std::vector<Vector>& candidates);

struct ExperimentResult {
  std::vector<RunOutcome> runs;  // ordered by repetition, then learner
  std::filesystem::path output;
  bool partial = false;
};

/// Runs every repetition of every learner on `config.workers` threads.
ExperimentResult run_all(const ExperimentConfig& config);

/// run_all plus records.csv, summary.csv, runs.csv, timing.csv and, for a
/// discrete action set, actions.csv under `config.output`.
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

inline constexpr const char* kSummaryColumns = "learner,t,metric,mean,p10,p90";

}  // namespace grinder
