#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "grinder/agents.hpp"
#include "grinder/types.hpp"

namespace grinder {

/// The four-point instance with h = (1,1,-1) and h' = (0.5,-1,0.25).
struct Theorem1Instance {
  static const std::array<LabeledPoint, 4>& support();
  static const std::array<double, 4>& probabilities();
  static Vector h();
  static Vector h_prime();
};

LabeledPoint theorem1_draw(Rng& rng);

/// Per-coordinate normal parameters; a single entry is broadcast to every coordinate.
struct GaussianParams {
  std::vector<double> pos_mean{0.7};
  std::vector<double> pos_sd{0.3};
  std::vector<double> neg_mean{0.4};
  std::vector<double> neg_sd{0.3};
  double pos_prob = 0.5;

  /// Overlapping-label variant: +1 ~ (N(0.6,0.4), N(0.4,0.6)), -1 mirrored.
  static GaussianParams hard();
  void validate(int dimension) const;
};

/// Features are clipped to [0,1]^d after drawing.
LabeledPoint gaussian_draw(Rng& rng, const GaussianParams& params, int dimension = 2);

/// Spammers (label -1) uniform on [0,0.6]^d; with probability p a non-spammer
/// (label +1) uniform on [0.4,1]^d.
LabeledPoint spam_mixture_draw(Rng& rng, double p, int dimension = 2);

enum class Regime { U, L };

/// Adaptive phase adversary with truthful agents. Each phase repeats one
/// feature vector whose label is +1 with probability 1/2 + eps (regime U) or
/// 1/2 - eps (regime L); the regime is a fair coin per phase unless forced.
class LowerBoundEnvironment {
 public:
  LowerBoundEnvironment(std::size_t horizon, int phases, std::optional<Regime> forced = std::nullopt);

  /// Throws StreamExhausted once all phases have been emitted.
  LabeledPoint next(Rng& rng);
  /// The learner's prediction sign on the last emitted point.
  void record_prediction(int prediction);

  int phase() const { return phase_; }
  long kappa() const { return kappa_; }
  double epsilon() const { return epsilon_; }
  Regime regime() const { return regime_; }
  std::size_t rounds_per_phase() const { return per_phase_; }
  Vector phase_feature() const;
  /// Expected excess loss accrued this phase had the labels come from U or L.
  double accumulated(Regime r) const { return r == Regime::U ? acc_u_ : acc_l_; }

 private:
  void start_phase(Rng& rng);

  std::size_t per_phase_;
  int phases_;
  std::optional<Regime> forced_;
  double epsilon_;
  int phase_ = -1;
  long kappa_ = 1;
  Regime regime_ = Regime::U;
  std::size_t emitted_in_phase_ = 0;
  double acc_u_ = 0.0;
  double acc_l_ = 0.0;
};

enum class StreamKind { Theorem1, Gaussian, SpamMixture, LowerBound };

std::string_view to_string(StreamKind kind);
StreamKind stream_kind_from_string(std::string_view name);

struct StreamConfig {
  StreamKind kind = StreamKind::Gaussian;
  GaussianParams gaussian;
  double spam_p = 0.6;
  int phases = 1;
  std::optional<Regime> forced_regime;
  std::uint64_t seed = 0;

  void validate(int dimension) const;
};

/// One learner's view of nature. Two streams built from the same config and
/// seed emit the same points, except that the lower-bound adversary adapts to
/// the predictions it is shown.
class Stream {
 public:
  Stream(const StreamConfig& config, int dimension, std::size_t horizon, std::uint64_t seed);

  LabeledPoint next();
  void record_prediction(int prediction);
  /// Agents in the lower-bound environment are truthful whatever the config says.
  bool forces_truthful() const { return config_.kind == StreamKind::LowerBound; }
  const LowerBoundEnvironment* lower_bound() const { return lower_bound_ ? &*lower_bound_ : nullptr; }

 private:
  StreamConfig config_;
  int dimension_;
  Rng rng_;
  std::optional<LowerBoundEnvironment> lower_bound_;
};

}  // namespace grinder
