#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "grinder/geometry.hpp"
#include "grinder/learner.hpp"
#include "grinder/oracle.hpp"

namespace grinder {

struct GrinderParams {
  double eta = 0.1;
  double gamma = 0.1;
  double delta = 0.1;  // radius bound known to the learner
  int dimension = 2;   // feature dimension d; actions live in [-1,1]^{d+1}
  /// Cuts leaving a piece below this volume are skipped (0 disables).
  double volume_floor = 0.0;
  /// Fragments at or below this volume are discarded.
  double min_volume = 1e-12;
  std::size_t max_polytopes = 1'000'000;

  void validate() const;
};

/// min(1/2, sqrt(log(ratio * T) / T)), with ratio = lambda(A) / smallest cell
/// volume (or K for a finite action set).
double default_rate(double measure_ratio, std::size_t horizon);

/// Number of cells T rounds of cuts can create: sum_{i=0}^{d+1} C(2t, i).
double partition_bound(int d, std::size_t t);

/// Terms of the exponential-weights second-order inequality accumulated over
/// a run:  sum_t E_q[lhat] - min_p L(p) <= eta/2 sum_t E_q[lhat^2] + log(ratio)/eta.
struct SecondOrderCheck {
  double estimated_loss = 0.0;   // sum_t sum_p q_t(p) lhat_t(p)
  double best_loss = 0.0;        // min over final cells of the cumulative estimate
  double second_moment = 0.0;    // sum_t sum_p q_t(p) lhat_t(p)^2
  double log_ratio = 0.0;        // log(lambda(A) / lambda(smallest final cell))
  double eta = 0.0;

  double lhs() const { return estimated_loss - best_loss; }
  double rhs() const { return 0.5 * eta * second_moment + log_ratio / eta; }
  bool holds(double slack = 1e-6) const { return lhs() <= rhs() + slack; }
};

/// Estimated losses of one round, before they are folded into the state.
struct RoundEstimate {
  std::vector<double> estimates;  // per action (discrete) or per new cell (continuous)
  double expected = 0.0;          // sum q * lhat
  double expected_square = 0.0;   // sum q * lhat^2
  RoundDiagnostics diagnostics;
};

/// GRINDER over the continuous action space [-1,1]^{d+1}.
class GrinderContinuous final : public Learner {
 public:
  GrinderContinuous(GrinderParams params, std::unique_ptr<InProbOracle> oracle);

  std::string_view name() const override { return "grinder"; }
  Vector select(Rng& rng) override;
  RoundDiagnostics update(const Vector& report, const LabeledPoint& sigma, const AgentModel& model, Rng& rng) override;

  const std::vector<Polytope>& regions() const { return regions_; }
  const std::vector<double>& cumulative_losses() const { return losses_; }
  /// Replaces the partition (used to freeze a state in experiments).
  void set_state(std::vector<Polytope> regions, std::vector<double> losses);

  std::vector<double> exploitation_distribution() const;  // q_t
  std::vector<double> sampling_distribution() const;      // pi_t
  double action_space_volume() const { return space_volume_; }
  std::size_t chosen_cell() const { return chosen_; }
  const GrinderParams& params() const { return params_; }
  SecondOrderCheck second_order() const;

 private:
  GrinderParams params_;
  std::unique_ptr<InProbOracle> oracle_;
  std::vector<Polytope> regions_;
  std::vector<double> losses_;
  double space_volume_;
  std::vector<double> pi_;
  std::size_t chosen_ = 0;
  Vector action_;
  double estimated_total_ = 0.0;
  double second_moment_ = 0.0;
};

/// GRINDER over a finite action set: exponential weights where an action's
/// loss is observed whenever the report falls outside its blind band.
class GrinderDiscrete final : public Learner {
 public:
  GrinderDiscrete(std::vector<Vector> actions, GrinderParams params, std::unique_ptr<InProbOracle> oracle);

  std::string_view name() const override { return "grinder"; }
  Vector select(Rng& rng) override;
  RoundDiagnostics update(const Vector& report, const LabeledPoint& sigma, const AgentModel& model, Rng& rng) override;

  /// Estimated losses of every action had `chosen` been played; the state is unchanged.
  RoundEstimate estimate(std::size_t chosen, const Vector& report, const LabeledPoint& sigma, const AgentModel& model,
                         Rng& rng);

  const std::vector<Vector>& actions() const { return actions_; }
  const std::vector<double>& cumulative_losses() const { return losses_; }
  void set_cumulative_losses(std::vector<double> losses);
  std::vector<double> exploitation_distribution() const;
  std::vector<double> sampling_distribution() const;
  std::size_t chosen() const { return chosen_; }
  const GrinderParams& params() const { return params_; }
  SecondOrderCheck second_order() const;

 private:
  std::vector<Vector> actions_;
  GrinderParams params_;
  std::unique_ptr<InProbOracle> oracle_;
  std::vector<double> losses_;
  std::vector<double> pi_;
  std::size_t chosen_ = 0;
  double estimated_total_ = 0.0;
  double second_moment_ = 0.0;
};

/// Exponential weights normalized after shifting by the minimum loss; throws
/// NumericalUnderflow when the result is not a distribution.
std::vector<double> exponential_weights(const std::vector<double>& losses, const std::vector<double>& measure, double eta);

}  // namespace grinder
