#pragma once

#include <cstddef>
#include <vector>

#include "grinder/learner.hpp"

namespace grinder {

/// Loss-based EXP3 with uniform exploration.
class Exp3 final : public Learner {
 public:
  Exp3(std::vector<Vector> actions, double eta, double gamma);
  /// gamma = min(1, sqrt(K ln K / ((e - 1) T))), eta = gamma / K.
  static Exp3 tuned(std::vector<Vector> actions, std::size_t horizon);

  std::string_view name() const override { return "exp3"; }
  Vector select(Rng& rng) override;
  RoundDiagnostics update(const Vector& report, const LabeledPoint& sigma, const AgentModel& model, Rng& rng) override;

  /// Bandit step on an arbitrary loss in [0,1] for the action last selected.
  void feed(double loss);

  std::vector<double> distribution() const;
  std::size_t chosen() const { return chosen_; }
  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  const std::vector<Vector>& actions() const { return actions_; }

 private:
  std::vector<Vector> actions_;
  double eta_;
  double gamma_;
  std::vector<double> estimated_;  // cumulative importance-weighted losses
  std::vector<double> pi_;
  std::size_t chosen_ = 0;
};

struct BgdParams {
  double step = 0.05;
  double radius = 0.2;  // perturbation radius
  int dimension = 2;    // feature dimension d; actions have d+1 coordinates

  void validate() const;
};

/// Bandit gradient descent with a one-point gradient estimate, projected onto
/// the box shrunk by the perturbation radius so every played point stays in A.
class Bgd final : public Learner {
 public:
  explicit Bgd(BgdParams params);

  std::string_view name() const override { return "bgd"; }
  Vector select(Rng& rng) override;
  RoundDiagnostics update(const Vector& report, const LabeledPoint& sigma, const AgentModel& model, Rng& rng) override;

  void feed(double loss);
  const Vector& center() const { return center_; }
  const Vector& played() const { return played_; }

 private:
  BgdParams params_;
  Vector center_;
  Vector direction_;
  Vector played_;
};

}  // namespace grinder
