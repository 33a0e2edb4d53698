#include "grinder/grinder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grinder/error.hpp"

namespace grinder {

namespace {

std::size_t draw_index(const std::vector<double>& p, Rng& rng) {
  std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
  return pick(rng);
}

std::vector<double> mix_uniform(const std::vector<double>& q, const std::vector<double>& measure, double total, double gamma) {
  std::vector<double> pi(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) pi[i] = (1.0 - gamma) * q[i] + gamma * measure[i] / total;
  return pi;
}

enum class Side { Upper, Lower, Middle };

struct Piece {
  Polytope region;
  Side side;
  std::size_t parent;
};

// Splits `p` by `h`, unless the floor forbids it; returns (inside, outside).
// A skipped cut leaves `p` whole on the `unsplit_inside` side.
std::pair<std::optional<Polytope>, std::optional<Polytope>> cut(const Polytope& p, const Halfspace& h, const GrinderParams& params,
                                                               bool unsplit_inside) {
  PolytopeSplit s = p.split(h);
  auto tiny = [&](const std::optional<Polytope>& piece) { return piece && volume(*piece) <= params.min_volume; };
  if (tiny(s.inside)) s.inside.reset();
  if (tiny(s.outside)) s.outside.reset();
  if (params.volume_floor > 0.0 && s.inside && s.outside &&
      std::min(volume(*s.inside), volume(*s.outside)) < params.volume_floor) {
    if (unsplit_inside) return {p, std::nullopt};
    return {std::nullopt, p};
  }
  return {std::move(s.inside), std::move(s.outside)};
}

}  // namespace

void GrinderParams::validate() const {
  if (!(eta > 0.0 && eta <= 0.5)) throw ConfigError("learner.eta: must lie in (0, 1/2]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("learner.gamma: must lie in [0, 1]");
  if (!(delta >= 0.0)) throw ConfigError("learner.delta: must be non-negative");
  if (dimension < 1) throw ConfigError("dimension: must be positive");
  if (!(volume_floor >= 0.0)) throw ConfigError("learner.volume_floor: must be non-negative");
  if (max_polytopes == 0) throw ConfigError("learner.max_polytopes: must be positive");
}

double default_rate(double measure_ratio, std::size_t horizon) {
  const double t = static_cast<double>(std::max<std::size_t>(horizon, 1));
  const double arg = std::log(std::max(measure_ratio * t, 1.0)) / t;
  return std::min(0.5, std::sqrt(arg));
}

double partition_bound(int d, std::size_t t) {
  const double n = 2.0 * static_cast<double>(t);
  double total = 0.0, binom = 1.0;
  for (int i = 0; i <= d + 1; ++i) {
    if (i > 0) binom *= (n - (i - 1)) / i;
    if (binom <= 0.0) break;
    total += binom;
  }
  return total;
}

std::vector<double> exponential_weights(const std::vector<double>& losses, const std::vector<double>& measure, double eta) {
  const double lmin = *std::min_element(losses.begin(), losses.end());
  std::vector<double> w(losses.size());
  double total = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    w[i] = measure[i] * std::exp(-eta * (losses[i] - lmin));
    total += w[i];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericalUnderflow("exponential weights vanished; the learning rate is too large for this horizon");
  for (double& v : w) v /= total;
  return w;
}

// ---------------------------------------------------------------- continuous

GrinderContinuous::GrinderContinuous(GrinderParams params, std::unique_ptr<InProbOracle> oracle)
    : params_(params), oracle_(std::move(oracle)) {
  params_.validate();
  if (!oracle_) throw ConfigError("oracle: GRINDER needs an in-probability oracle");
  regions_.push_back(Polytope::cube(params_.dimension + 1));
  losses_.push_back(0.0);
  space_volume_ = volume(regions_.front());
}

void GrinderContinuous::set_state(std::vector<Polytope> regions, std::vector<double> losses) {
  if (regions.empty() || regions.size() != losses.size()) throw ConfigError("partition and losses must align");
  regions_ = std::move(regions);
  losses_ = std::move(losses);
  pi_.clear();
}

std::vector<double> GrinderContinuous::exploitation_distribution() const {
  std::vector<double> measure;
  measure.reserve(regions_.size());
  for (const auto& p : regions_) measure.push_back(volume(p));
  return exponential_weights(losses_, measure, params_.eta);
}

std::vector<double> GrinderContinuous::sampling_distribution() const {
  std::vector<double> measure;
  measure.reserve(regions_.size());
  for (const auto& p : regions_) measure.push_back(volume(p));
  return mix_uniform(exponential_weights(losses_, measure, params_.eta), measure, space_volume_, params_.gamma);
}

Vector GrinderContinuous::select(Rng& rng) {
  pi_ = sampling_distribution();
  chosen_ = draw_index(pi_, rng);
  action_ = sample_uniform(regions_[chosen_], rng);
  return action_;
}

RoundDiagnostics GrinderContinuous::update(const Vector& report, const LabeledPoint& sigma, const AgentModel& model, Rng& rng) {
  if (pi_.size() != regions_.size()) throw ConfigError("update called before select");
  const double c = blind_band(params_.dimension, params_.delta);
  Vector normal(report.size() + 1);
  normal.head(report.size()) = report;
  normal(report.size()) = 1.0;
  const Halfspace below_upper = Halfspace::make(normal, c);   // outside: <n,w> >= c
  const Halfspace below_lower = Halfspace::make(normal, -c);  // inside:  <n,w> <= -c

  const std::vector<double> q = exploitation_distribution();
  std::vector<Piece> pieces;
  pieces.reserve(regions_.size() * 2);
  for (std::size_t s = 0; s < regions_.size(); ++s) {
    auto [rest, upper] = cut(regions_[s], below_upper, params_, true);
    if (upper) pieces.push_back({std::move(*upper), Side::Upper, s});
    if (!rest) continue;
    auto [lower, middle] = cut(*rest, below_lower, params_, false);
    if (lower) pieces.push_back({std::move(*lower), Side::Lower, s});
    if (middle) pieces.push_back({std::move(*middle), Side::Middle, s});
  }
  if (pieces.size() > params_.max_polytopes)
    throw BudgetExceeded("partition grew to " + std::to_string(pieces.size()) + " cells");

  const bool negative = sigma.y == Label::Negative;
  auto inferred_loss = [&](const Piece& p) {
    return (negative && p.side == Side::Upper) || (!negative && p.side == Side::Lower) ? 1 : 0;
  };

  std::size_t played = pieces.size();
  for (std::size_t k = 0; k < pieces.size() && played == pieces.size(); ++k)
    if (pieces[k].parent == chosen_ && contains(pieces[k].region, action_)) played = k;

  OracleQuery query;
  query.regions = &regions_;
  query.pi = &pi_;
  query.chosen = chosen_;
  query.chosen_action = action_;
  query.report = report;
  query.threshold = c;
  query.sigma = &sigma;
  query.model = &model;
  std::vector<std::size_t> target_index;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const bool updated = pieces[k].side != Side::Middle;
    if (updated) query.updated_mass += pi_[pieces[k].parent] * volume(pieces[k].region) / volume(regions_[pieces[k].parent]);
    if (updated && (inferred_loss(pieces[k]) == 1 || k == played)) {
      target_index.push_back(k);
      query.target_regions.push_back(&pieces[k].region);
    }
  }
  const std::vector<double> p_in = oracle_->evaluate(query, rng);

  RoundDiagnostics diag;
  diag.action = action_;
  diag.report = report;
  diag.y = sigma.y;
  diag.loss = binary_loss(action_, report, sigma.y);

  std::vector<double> lhat(pieces.size(), 0.0);
  for (std::size_t t = 0; t < target_index.size(); ++t) {
    const std::size_t k = target_index[t];
    if (!(p_in[t] > 0.0)) throw OracleInconsistency("oracle returned a non-positive in-probability for an updated region");
    lhat[k] = inferred_loss(pieces[k]) / p_in[t];
    if (k == played) diag.oracle_value = p_in[t];
  }
  if (played < pieces.size()) diag.point_estimate = lhat[played];

  std::vector<Polytope> next_regions;
  std::vector<double> next_losses;
  next_regions.reserve(pieces.size());
  next_losses.reserve(pieces.size());
  double expected = 0.0, expected_sq = 0.0;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const std::size_t s = pieces[k].parent;
    const double qk = q[s] * volume(pieces[k].region) / volume(regions_[s]);
    expected += qk * lhat[k];
    expected_sq += qk * lhat[k] * lhat[k];
    next_losses.push_back(losses_[s] + lhat[k]);
    next_regions.push_back(std::move(pieces[k].region));
  }
  estimated_total_ += expected;
  second_moment_ += expected_sq;

  oracle_->observe(query);
  regions_ = std::move(next_regions);
  losses_ = std::move(next_losses);
  pi_.clear();

  diag.partition_size = regions_.size();
  diag.min_volume = INFINITY;
  diag.max_volume = 0.0;
  for (const auto& p : regions_) {
    diag.min_volume = std::min(diag.min_volume, volume(p));
    diag.max_volume = std::max(diag.max_volume, volume(p));
  }
  return diag;
}

SecondOrderCheck GrinderContinuous::second_order() const {
  SecondOrderCheck check;
  check.estimated_loss = estimated_total_;
  check.second_moment = second_moment_;
  check.eta = params_.eta;
  double min_vol = INFINITY;
  for (const auto& p : regions_) min_vol = std::min(min_vol, volume(p));
  check.best_loss = *std::min_element(losses_.begin(), losses_.end());
  check.log_ratio = std::log(space_volume_ / min_vol);
  return check;
}

// ------------------------------------------------------------------ discrete

GrinderDiscrete::GrinderDiscrete(std::vector<Vector> actions, GrinderParams params, std::unique_ptr<InProbOracle> oracle)
    : actions_(std::move(actions)), params_(params), oracle_(std::move(oracle)), losses_(actions_.size(), 0.0) {
  params_.validate();
  if (actions_.empty()) throw ConfigError("action_set: the discrete action set is empty");
  if (!oracle_) throw ConfigError("oracle: GRINDER needs an in-probability oracle");
}

void GrinderDiscrete::set_cumulative_losses(std::vector<double> losses) {
  if (losses.size() != actions_.size()) throw ConfigError("one cumulative loss per action is required");
  losses_ = std::move(losses);
  pi_.clear();
}

std::vector<double> GrinderDiscrete::exploitation_distribution() const {
  return exponential_weights(losses_, std::vector<double>(actions_.size(), 1.0), params_.eta);
}

std::vector<double> GrinderDiscrete::sampling_distribution() const {
  const std::vector<double> unit(actions_.size(), 1.0);
  return mix_uniform(exponential_weights(losses_, unit, params_.eta), unit, static_cast<double>(actions_.size()), params_.gamma);
}

Vector GrinderDiscrete::select(Rng& rng) {
  pi_ = sampling_distribution();
  chosen_ = draw_index(pi_, rng);
  return actions_[chosen_];
}

RoundEstimate GrinderDiscrete::estimate(std::size_t chosen, const Vector& report, const LabeledPoint& sigma,
                                        const AgentModel& model, Rng& rng) {
  if (chosen >= actions_.size()) throw InvalidTarget("chosen action index out of range");
  if (pi_.size() != actions_.size()) pi_ = sampling_distribution();
  const double c = blind_band(params_.dimension, params_.delta);
  const std::size_t k = actions_.size();

  RoundEstimate est;
  est.diagnostics.action = actions_[chosen];
  est.diagnostics.report = report;
  est.diagnostics.y = sigma.y;
  est.diagnostics.loss = binary_loss(actions_[chosen], report, sigma.y);

  std::vector<int> loss(k, 0);
  OracleQuery query;
  query.actions = &actions_;
  query.pi = &pi_;
  query.chosen = chosen;
  query.chosen_action = actions_[chosen];
  query.report = report;
  query.threshold = c;
  query.sigma = &sigma;
  query.model = &model;
  for (std::size_t j = 0; j < k; ++j) {
    const double s = score(actions_[j], report);
    if (j == chosen) {
      loss[j] = est.diagnostics.loss;
    } else if (std::abs(s) >= c) {
      loss[j] = binary_loss(actions_[j], report, sigma.y);
    } else {
      continue;
    }
    if (loss[j] == 1 || j == chosen) query.target_actions.push_back(j);
  }
  const std::vector<double> p_in = oracle_->evaluate(query, rng);

  est.estimates.assign(k, 0.0);
  for (std::size_t t = 0; t < query.target_actions.size(); ++t) {
    const std::size_t j = query.target_actions[t];
    if (!(p_in[t] > 0.0)) throw OracleInconsistency("oracle returned a non-positive in-probability for an updated action");
    est.estimates[j] = loss[j] / p_in[t];
    if (j == chosen) est.diagnostics.oracle_value = p_in[t];
  }
  est.diagnostics.point_estimate = est.estimates[chosen];
  const std::vector<double> q = exploitation_distribution();
  for (std::size_t j = 0; j < k; ++j) {
    est.expected += q[j] * est.estimates[j];
    est.expected_square += q[j] * est.estimates[j] * est.estimates[j];
  }
  est.diagnostics.partition_size = k;
  est.diagnostics.min_volume = est.diagnostics.max_volume = 1.0;
  return est;
}

RoundDiagnostics GrinderDiscrete::update(const Vector& report, const LabeledPoint& sigma, const AgentModel& model, Rng& rng) {
  if (pi_.size() != actions_.size()) throw ConfigError("update called before select");
  RoundEstimate est = estimate(chosen_, report, sigma, model, rng);
  for (std::size_t j = 0; j < actions_.size(); ++j) losses_[j] += est.estimates[j];
  estimated_total_ += est.expected;
  second_moment_ += est.expected_square;

  OracleQuery seen;
  seen.actions = &actions_;
  seen.pi = &pi_;
  seen.chosen = chosen_;
  seen.chosen_action = actions_[chosen_];
  seen.report = report;
  seen.threshold = blind_band(params_.dimension, params_.delta);
  oracle_->observe(seen);
  pi_.clear();
  return est.diagnostics;
}

SecondOrderCheck GrinderDiscrete::second_order() const {
  SecondOrderCheck check;
  check.estimated_loss = estimated_total_;
  check.second_moment = second_moment_;
  check.eta = params_.eta;
  check.best_loss = *std::min_element(losses_.begin(), losses_.end());
  check.log_ratio = std::log(static_cast<double>(actions_.size()));
  return check;
}

}  // namespace grinder
