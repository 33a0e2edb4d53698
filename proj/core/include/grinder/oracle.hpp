#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "grinder/agents.hpp"
#include "grinder/geometry.hpp"
#include "grinder/types.hpp"

namespace grinder {

/// Half-width of the blind band: 4 * sqrt(d) * delta.
double blind_band(int d, double delta);

/// True when the loss of `target` can be read off `report`: |<target, (report, 1)>| >= c.
bool action_updated(const Vector& target, const Vector& report, double c);

/// True when the whole region lies on one side of the band around `report`.
bool region_updated(const Polytope& target, const Vector& report, double c);

/// Everything an in-probability oracle may be asked about one round.
///
/// `sigma` and `model` are simulator ground truth; only the privileged oracles
/// read them.
struct OracleQuery {
  // Discrete action sets: the actions and the distribution they were drawn from.
  const std::vector<Vector>* actions = nullptr;
  std::vector<std::size_t> target_actions;

  // Continuous action sets: the partition before this round's cuts, its
  // distribution, and the new regions whose in-probability is needed.
  const std::vector<Polytope>* regions = nullptr;
  std::vector<const Polytope*> target_regions;
  /// Mass of the updated regions under pi (continuous crude bound).
  double updated_mass = 0.0;

  const std::vector<double>* pi = nullptr;
  std::size_t chosen = 0;
  Vector chosen_action;
  Vector report;
  double threshold = 0.0;

  const LabeledPoint* sigma = nullptr;
  const AgentModel* model = nullptr;

  bool discrete() const { return actions != nullptr; }
  std::size_t target_count() const { return discrete() ? target_actions.size() : target_regions.size(); }
};

class InProbOracle {
 public:
  virtual ~InProbOracle() = default;
  virtual std::string_view name() const = 0;
  /// One probability in (0, 1] per target, in query order.
  virtual std::vector<double> evaluate(const OracleQuery& query, Rng& rng) = 0;
  /// Called once per round after the learner update, with every action's
  /// update status known to the learner.
  virtual void observe(const OracleQuery& /*query*/) {}
};

/// Exact sum over the discrete action set of pi(i) * 1{i updates j}, replaying
/// the agent's best response to each action.
class ExactDiscreteOracle final : public InProbOracle {
 public:
  std::string_view name() const override { return "exact"; }
  std::vector<double> evaluate(const OracleQuery& query, Rng& rng) override;
};

/// Continuous in-probability by stratified Monte Carlo over the partition.
/// Regions whose update status cannot depend on the sampled action are
/// resolved exactly; the rest share one sample set whose standard error is at
/// most 1 / (2 sqrt(samples)).
class ExactContinuousOracle final : public InProbOracle {
 public:
  explicit ExactContinuousOracle(std::size_t samples = 250'000) : samples_(samples) {}
  std::string_view name() const override { return "exact"; }
  std::vector<double> evaluate(const OracleQuery& query, Rng& rng) override;
  std::size_t samples() const { return samples_; }

 private:
  std::size_t samples_;
};

/// Multiplies the inner value by a factor uniform on [1 - eps, 1 + eps].
class NoisyOracle final : public InProbOracle {
 public:
  NoisyOracle(std::unique_ptr<InProbOracle> inner, double epsilon);
  std::string_view name() const override { return "noisy"; }
  std::vector<double> evaluate(const OracleQuery& query, Rng& rng) override;
  void observe(const OracleQuery& query) override { inner_->observe(query); }

  double epsilon() const { return epsilon_; }
  std::size_t calls() const { return calls_; }
  /// Values that left the multiplicative band (other than by clamping to 1).
  std::size_t band_violations() const { return violations_; }

 private:
  std::unique_ptr<InProbOracle> inner_;
  double epsilon_;
  std::size_t calls_ = 0;
  std::size_t violations_ = 0;
};

struct LogisticSettings {
  double recency = 0.97;
  std::size_t window = 200;
  int iterations = 100;
  double step = 0.1;
  double l2 = 1e-3;
};

/// Learner-side estimate from past rounds: per-target logistic models of
/// "playing i updates j", combined with the crude floor that every action
/// updates itself and that actions in the updated sets update each other.
class LogisticOracle final : public InProbOracle {
 public:
  explicit LogisticOracle(LogisticSettings settings = {}) : settings_(settings) {}
  std::string_view name() const override { return "logistic"; }
  std::vector<double> evaluate(const OracleQuery& query, Rng& rng) override;
  void observe(const OracleQuery& query) override;

  const LogisticSettings& settings() const { return settings_; }
  std::size_t history_size() const { return rows_.size(); }

  /// Crude lower bound for a discrete target.
  static double crude_bound(const OracleQuery& query, std::size_t target);

 private:
  struct Row {
    Vector action;
    Vector report;
  };

  Eigen::MatrixXd design(const std::vector<Vector>& actions, const Vector& report) const;
  Eigen::VectorXd recency_weights() const;
  std::vector<double> evaluate_discrete(const OracleQuery& query);
  std::vector<double> evaluate_continuous(const OracleQuery& query);

  LogisticSettings settings_;
  std::deque<Row> rows_;
  double threshold_ = 0.0;
  Eigen::MatrixXd weights_;  // one column per discrete target, warm-started
};

/// Sigmoid-weighted logistic regression by gradient descent.
/// Returns the coefficient matrix (features x targets).
Eigen::MatrixXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& labels, const Eigen::VectorXd& row_weights,
                             Eigen::MatrixXd init, const LogisticSettings& settings);

enum class OracleKind { Exact, Noisy, Logistic };

std::string_view to_string(OracleKind kind);
OracleKind oracle_kind_from_string(std::string_view name);

struct OracleConfig {
  OracleKind kind = OracleKind::Exact;
  double epsilon = 0.0;  // noisy wrapper around the exact oracle
  std::size_t mc_samples = 250'000;
  LogisticSettings logistic;

  void validate() const;
};

std::unique_ptr<InProbOracle> make_oracle(const OracleConfig& config, bool discrete);

}  // namespace grinder
