#include "grinder/environments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grinder/error.hpp"

namespace grinder {

namespace {

LabeledPoint point(double a, double b, Label y) {
  Vector x(2);
  x << a, b;
  return {x, y};
}

double pick(const std::vector<double>& v, int i) { return v.size() == 1 ? v[0] : v[static_cast<std::size_t>(i)]; }

}  // namespace

const std::array<LabeledPoint, 4>& Theorem1Instance::support() {
  static const std::array<LabeledPoint, 4> pts{point(0.4, 0.5, Label::Negative), point(0.6, 0.6, Label::Negative),
                                               point(0.8, 0.9, Label::Positive), point(0.65, 0.3, Label::Positive)};
  return pts;
}

const std::array<double, 4>& Theorem1Instance::probabilities() {
  static const std::array<double, 4> p{0.05, 0.15, 0.05, 0.75};
  return p;
}

Vector Theorem1Instance::h() {
  Vector v(3);
  v << 1.0, 1.0, -1.0;
  return v;
}

Vector Theorem1Instance::h_prime() {
  Vector v(3);
  v << 0.5, -1.0, 0.25;
  return v;
}

LabeledPoint theorem1_draw(Rng& rng) {
  const auto& p = Theorem1Instance::probabilities();
  std::discrete_distribution<int> pick_point(p.begin(), p.end());
  return Theorem1Instance::support()[static_cast<std::size_t>(pick_point(rng))];
}

GaussianParams GaussianParams::hard() {
  GaussianParams g;
  g.pos_mean = {0.6, 0.4};
  g.pos_sd = {0.4, 0.6};
  g.neg_mean = {0.4, 0.6};
  g.neg_sd = {0.6, 0.4};
  return g;
}

void GaussianParams::validate(int dimension) const {
  for (const auto* v : {&pos_mean, &pos_sd, &neg_mean, &neg_sd})
    if (v->size() != 1 && static_cast<int>(v->size()) != dimension)
      throw ConfigError("stream.gaussian: parameter lists need 1 or " + std::to_string(dimension) + " entries");
  for (const auto* v : {&pos_sd, &neg_sd})
    for (double s : *v)
      if (!(s > 0.0)) throw ConfigError("stream.gaussian: standard deviations must be positive");
  if (!(pos_prob >= 0.0 && pos_prob <= 1.0)) throw ConfigError("stream.gaussian.pos_prob: must lie in [0, 1]");
}

LabeledPoint gaussian_draw(Rng& rng, const GaussianParams& params, int dimension) {
  const bool positive = uniform01(rng) < params.pos_prob;
  Vector x(dimension);
  for (int i = 0; i < dimension; ++i) {
    const double m = pick(positive ? params.pos_mean : params.neg_mean, i);
    const double s = pick(positive ? params.pos_sd : params.neg_sd, i);
    x(i) = std::clamp(std::normal_distribution<double>(m, s)(rng), 0.0, 1.0);
  }
  return {x, positive ? Label::Positive : Label::Negative};
}

LabeledPoint spam_mixture_draw(Rng& rng, double p, int dimension) {
  const bool genuine = uniform01(rng) < p;
  Vector x(dimension);
  for (int i = 0; i < dimension; ++i) x(i) = genuine ? 0.4 + 0.6 * uniform01(rng) : 0.6 * uniform01(rng);
  return {x, genuine ? Label::Positive : Label::Negative};
}

LowerBoundEnvironment::LowerBoundEnvironment(std::size_t horizon, int phases, std::optional<Regime> forced)
    : per_phase_(phases > 0 ? horizon / static_cast<std::size_t>(phases) : 0), phases_(phases), forced_(forced) {
  if (phases < 1) throw ConfigError("stream.phases: must be at least 1");
  if (per_phase_ == 0) throw ConfigError("stream.phases: more phases than rounds");
  epsilon_ = 1.0 / (3.0 * std::sqrt(2.0 * static_cast<double>(horizon) / phases));
}

Vector LowerBoundEnvironment::phase_feature() const {
  Vector x(2);
  x << 0.5, 0.25 * (1.0 + static_cast<double>(kappa_) * std::ldexp(1.0, -phase_));
  return x;
}

void LowerBoundEnvironment::start_phase(Rng& rng) {
  if (phase_ >= 0) {
    // The regime that would have hurt the learner more fixes where the next
    // phase's point sits.
    kappa_ = acc_u_ >= acc_l_ ? 2 * kappa_ + 1 : 2 * kappa_ - 1;
  }
  ++phase_;
  if (phase_ >= phases_) throw StreamExhausted("lower-bound environment has no phase " + std::to_string(phase_));
  regime_ = forced_ ? *forced_ : (uniform01(rng) < 0.5 ? Regime::U : Regime::L);
  emitted_in_phase_ = 0;
  acc_u_ = acc_l_ = 0.0;
}

LabeledPoint LowerBoundEnvironment::next(Rng& rng) {
  if (phase_ < 0 || emitted_in_phase_ == per_phase_) start_phase(rng);
  ++emitted_in_phase_;
  const double p_pos = regime_ == Regime::U ? 0.5 + epsilon_ : 0.5 - epsilon_;
  return {phase_feature(), uniform01(rng) < p_pos ? Label::Positive : Label::Negative};
}

void LowerBoundEnvironment::record_prediction(int prediction) {
  if (prediction < 0)
    acc_u_ += 2.0 * epsilon_;
  else
    acc_l_ += 2.0 * epsilon_;
}

std::string_view to_string(StreamKind kind) {
  switch (kind) {
    case StreamKind::Theorem1: return "theorem1";
    case StreamKind::Gaussian: return "gaussian";
    case StreamKind::SpamMixture: return "spam";
    case StreamKind::LowerBound: return "lower_bound";
  }
  return "unknown";
}

StreamKind stream_kind_from_string(std::string_view name) {
  if (name == "theorem1") return StreamKind::Theorem1;
  if (name == "gaussian") return StreamKind::Gaussian;
  if (name == "spam") return StreamKind::SpamMixture;
  if (name == "lower_bound") return StreamKind::LowerBound;
  throw ConfigError("stream.kind: unknown kind '" + std::string(name) + "'");
}

void StreamConfig::validate(int dimension) const {
  switch (kind) {
    case StreamKind::Gaussian: gaussian.validate(dimension); break;
    case StreamKind::SpamMixture:
      if (!(spam_p >= 0.0 && spam_p <= 1.0)) throw ConfigError("stream.p: must lie in [0, 1]");
      break;
    case StreamKind::Theorem1:
    case StreamKind::LowerBound:
      if (dimension != 2) throw ConfigError("dimension: the " + std::string(to_string(kind)) + " stream is two-dimensional");
      if (kind == StreamKind::LowerBound && phases < 1) throw ConfigError("stream.phases: must be at least 1");
      break;
  }
}

Stream::Stream(const StreamConfig& config, int dimension, std::size_t horizon, std::uint64_t seed)
    : config_(config), dimension_(dimension), rng_(seed) {
  config_.validate(dimension);
  if (config_.kind == StreamKind::LowerBound) lower_bound_.emplace(horizon, config_.phases, config_.forced_regime);
}

LabeledPoint Stream::next() {
  switch (config_.kind) {
    case StreamKind::Theorem1: return theorem1_draw(rng_);
    case StreamKind::Gaussian: return gaussian_draw(rng_, config_.gaussian, dimension_);
    case StreamKind::SpamMixture: return spam_mixture_draw(rng_, config_.spam_p, dimension_);
    case StreamKind::LowerBound: return lower_bound_->next(rng_);
  }
  throw ConfigError("stream.kind: unsupported");
}

void Stream::record_prediction(int prediction) {
  if (lower_bound_) lower_bound_->record_prediction(prediction);
}

}  // namespace grinder
