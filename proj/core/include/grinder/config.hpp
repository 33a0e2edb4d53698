#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grinder/agents.hpp"
#include "grinder/environments.hpp"
#include "grinder/oracle.hpp"

namespace grinder {

/// $GRINDER_OUT_DIR if set, else "grinder-out". Used when a config names no output.
std::filesystem::path default_output_dir();

enum class LearnerKind { Grinder, Exp3, Bgd };

std::string_view to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(std::string_view name);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::Grinder;
  std::string label;  // series name in the output; defaults from kind and oracle
  // GRINDER. Unset rates fall back to default_rate.
  std::optional<double> eta;
  std::optional<double> gamma;
  double volume_floor = 0.01;
  std::optional<double> delta;  // defaults to the agents' misreport radius
  OracleConfig oracle;
  // BGD.
  double step = 0.05;
  double radius = 0.2;
};

enum class ActionMode { Continuous, Discrete };

struct ActionSetConfig {
  ActionMode mode = ActionMode::Discrete;
  std::size_t size = 100;    // seeded uniform draw from [-1,1]^{d+1}
  std::uint64_t seed = 7;
  std::vector<Vector> explicit_actions;  // overrides size/seed when non-empty
  /// Continuous mode: seeded candidates for an approximate (upper-bound) best
  /// fixed action; 0 reports cumulative loss only.
  std::size_t candidates = 0;
};

struct BudgetConfig {
  std::size_t max_polytopes = 200'000;
  double memory_mb = 4096.0;
};

struct ExperimentConfig {
  StreamConfig stream;
  AgentModel agent = AgentModel::indicator(0.1);
  std::vector<LearnerConfig> learners{LearnerConfig{}};
  ActionSetConfig action_set;
  BudgetConfig budget;
  std::size_t horizon = 1000;
  std::size_t repetitions = 30;
  std::uint64_t seed = 1;
  int dimension = 2;
  std::filesystem::path output = default_output_dir();
  std::size_t workers = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Labels with defaults filled in, in learner order.
  std::vector<std::string> learner_labels() const;
};

/// Parses the JSON config format documented in the README. Unknown keys are
/// rejected so that typos surface as errors.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The discrete action set the config describes (empty in continuous mode).
std::vector<Vector> build_action_set(const ExperimentConfig& config);
/// Candidates for regret accounting: the action set, or the seeded grid in continuous mode.
std::vector<Vector> build_candidates(const ExperimentConfig& config);

}  // namespace grinder
