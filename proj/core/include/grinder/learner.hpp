#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>

#include "grinder/agents.hpp"
#include "grinder/types.hpp"

namespace grinder {

struct RoundDiagnostics {
  Vector action;
  Vector report;
  Label y = Label::Positive;
  int loss = 0;
  std::size_t partition_size = 0;
  double min_volume = 0.0;
  double max_volume = 0.0;
  /// In-probability of the region (or action) that was played; NaN when its
  /// loss could not be inferred this round.
  double oracle_value = std::numeric_limits<double>::quiet_NaN();
  /// Estimated loss of the played region, logged for inspection only.
  double point_estimate = 0.0;
};

/// A learner in the repeated game: pick an action, then see the report and
/// the label. `sigma` and `model` are passed through to privileged oracles
/// and are not otherwise consulted.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string_view name() const = 0;
  virtual Vector select(Rng& rng) = 0;
  virtual RoundDiagnostics update(const Vector& report, const LabeledPoint& sigma, const AgentModel& model, Rng& rng) = 0;
};

}  // namespace grinder
