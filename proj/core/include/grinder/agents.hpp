#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grinder/types.hpp"

namespace grinder {

struct LabeledPoint {
  Vector x;  // features in [0,1]^d
  Label y = Label::Positive;

  /// (x, 1), the vector the learner's hyperplanes act on.
  Vector lifted() const;
};

enum class AgentFamily { IndicatorValue, LinearValue, Truthful, Adversarial };

std::string_view to_string(AgentFamily family);
AgentFamily agent_family_from_string(std::string_view name);

struct AgentModel {
  AgentFamily family = AgentFamily::Truthful;
  double delta = 0.1;        // misreport radius
  double value_coeff = 0.1;  // δ' of the indicator or linear utility

  static AgentModel truthful() { return {AgentFamily::Truthful, 0.1, 0.1}; }
  static AgentModel indicator(double delta) { return {AgentFamily::IndicatorValue, delta, delta}; }
  static AgentModel linear(double delta) { return {AgentFamily::LinearValue, delta, delta}; }
  static AgentModel adversarial(double delta) { return {AgentFamily::Adversarial, delta, delta}; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Largest distance a report can move from the true features.
  double radius() const { return family == AgentFamily::Truthful ? 0.0 : delta; }
};

/// <alpha, (z, 1)>: signed score of features z under hyperplane alpha (length d+1).
double score(const Vector& alpha, const Vector& z);

/// sgn with the convention sgn(0) = +1.
inline int sgn(double v) { return v >= 0.0 ? 1 : -1; }

/// Value minus cost of reporting z, for the model's utility family. For
/// Adversarial agents this is the learner's loss (what they maximize).
double utility(const Vector& alpha, const LabeledPoint& sigma, const AgentModel& model, const Vector& z);

Vector best_response(const Vector& alpha, const LabeledPoint& sigma, const AgentModel& model);

/// Grid search over {x + k * grid_step} inside the ball and [0,1]^d. Ties go to
/// the truthful report, then the closest point, then lexicographic order.
Vector brute_force_best_response(const Vector& alpha, const LabeledPoint& sigma, const AgentModel& model,
                                 double grid_step);

/// 1 iff sgn(<alpha, (report, 1)>) != y, with sgn(0) = +1.
int binary_loss(const Vector& alpha, const Vector& report, Label y);

double hinge_loss(const Vector& alpha, const Vector& report, Label y);

inline constexpr double kStrictMargin = 1e-9;

/// Cheapest report in [0,1]^d on the requested side of alpha's hyperplane:
/// score >= margin when `positive` holds, score <= -margin otherwise.
/// Empty when the box has no such point.
std::optional<Vector> min_cost_crossing(const Vector& alpha, const Vector& x, bool positive, double margin = 0.0);

/// Strongly concave utility <alpha_bar, z> - ||x - z||^2 used for the
/// closeness-of-maxima property.
double quadratic_utility(const Vector& alpha_bar, const Vector& x, const Vector& z);

/// Maximizer of `u` over the grid {k * step} of [0,1]^d, lexicographic ties.
template <class Utility>
Vector grid_argmax(int d, double step, Utility&& u) {
  const int n = static_cast<int>(1.0 / step + 0.5);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vector z = Vector::Zero(d);
  Vector best = z;
  double best_u = u(z);
  while (true) {
    int k = 0;
    while (k < d && idx[k] == n) {
      idx[k] = 0;
      z(k) = 0.0;
      ++k;
    }
    if (k == d) break;
    ++idx[k];
    z(k) = std::min(1.0, idx[k] * step);
    const double v = u(z);
    if (v > best_u) {
      best_u = v;
      best = z;
    }
  }
  return best;
}

}  // namespace grinder
