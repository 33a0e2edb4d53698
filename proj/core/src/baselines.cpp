#include "grinder/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grinder/error.hpp"
#include "grinder/grinder.hpp"

namespace grinder {

Exp3::Exp3(std::vector<Vector> actions, double eta, double gamma)
    : actions_(std::move(actions)), eta_(eta), gamma_(gamma), estimated_(actions_.size(), 0.0) {
  if (actions_.empty()) throw ConfigError("action_set: EXP3 needs at least one action");
  if (!(eta > 0.0)) throw ConfigError("learner.eta: must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("learner.gamma: must lie in [0, 1]");
}

Exp3 Exp3::tuned(std::vector<Vector> actions, std::size_t horizon) {
  const double k = static_cast<double>(actions.size());
  const double t = static_cast<double>(std::max<std::size_t>(horizon, 1));
  double gamma = k > 1.0 ? std::min(1.0, std::sqrt(k * std::log(k) / ((std::numbers::e - 1.0) * t))) : 1.0;
  return Exp3(std::move(actions), gamma / k, gamma);
}

std::vector<double> Exp3::distribution() const {
  const std::vector<double> q = exponential_weights(estimated_, std::vector<double>(actions_.size(), 1.0), eta_);
  std::vector<double> p(q.size());
  const double k = static_cast<double>(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) p[i] = (1.0 - gamma_) * q[i] + gamma_ / k;
  return p;
}

Vector Exp3::select(Rng& rng) {
  pi_ = distribution();
  std::discrete_distribution<std::size_t> pick(pi_.begin(), pi_.end());
  chosen_ = pick(rng);
  return actions_[chosen_];
}

void Exp3::feed(double loss) {
  if (pi_.size() != actions_.size()) throw ConfigError("update called before select");
  estimated_[chosen_] += std::clamp(loss, 0.0, 1.0) / pi_[chosen_];
  pi_.clear();
}

RoundDiagnostics Exp3::update(const Vector& report, const LabeledPoint& sigma, const AgentModel&, Rng&) {
  RoundDiagnostics diag;
  diag.action = actions_[chosen_];
  diag.report = report;
  diag.y = sigma.y;
  diag.loss = binary_loss(diag.action, report, sigma.y);
  diag.partition_size = actions_.size();
  diag.min_volume = diag.max_volume = 1.0;
  feed(diag.loss);
  return diag;
}

void BgdParams::validate() const {
  if (!(step > 0.0)) throw ConfigError("learner.step: must be positive");
  if (!(radius > 0.0 && radius < 1.0)) throw ConfigError("learner.radius: must lie in (0, 1)");
  if (dimension < 1) throw ConfigError("dimension: must be positive");
}

Bgd::Bgd(BgdParams params) : params_(params) {
  params_.validate();
  center_ = Vector::Zero(params_.dimension + 1);
}

Vector Bgd::select(Rng& rng) {
  const Eigen::Index n = center_.size();
  std::normal_distribution<double> gauss;
  direction_.resize(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) direction_(i) = gauss(rng);
  } while (direction_.norm() == 0.0);
  direction_.normalize();
  played_ = center_ + params_.radius * direction_;
  return played_;
}

void Bgd::feed(double loss) {
  const double n = static_cast<double>(center_.size());
  const Vector g = (n / params_.radius) * std::clamp(loss, 0.0, 1.0) * direction_;
  const double bound = 1.0 - params_.radius;
  center_ = (center_ - params_.step * g).cwiseMax(-bound).cwiseMin(bound);
}

RoundDiagnostics Bgd::update(const Vector& report, const LabeledPoint& sigma, const AgentModel&, Rng&) {
  RoundDiagnostics diag;
  diag.action = played_;
  diag.report = report;
  diag.y = sigma.y;
  diag.loss = binary_loss(played_, report, sigma.y);
  diag.partition_size = 1;
  diag.min_volume = diag.max_volume = 0.0;
  feed(diag.loss);
  return diag;
}

}  // namespace grinder
