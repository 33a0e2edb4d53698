#include "grinder/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "grinder/error.hpp"

namespace grinder {

namespace {

double clamp_probability(double v) { return std::min(1.0, v); }

bool same_vector(const Vector& a, const Vector& b) { return a.size() == b.size() && (a.array() == b.array()).all(); }

// Update status of a region from the scores of its vertices at the true
// features: regions on one side of the band by more than the agent can move
// are updated by every action.
enum class Status { AlwaysUpdated, Ambiguous };

Status region_status(const Polytope& target, const Vector& x, double radius, double c) {
  bool upper = true, lower = true;
  const Eigen::Index d = x.size();
  for (const auto& v : target.vertices()) {
    const double s = score(v, x);
    const double slack = v.head(d).norm() * radius;
    upper = upper && s - slack >= c;
    lower = lower && s + slack <= -c;
  }
  return upper || lower ? Status::AlwaysUpdated : Status::Ambiguous;
}

Vector design_row(const Vector& action, const Vector& report) {
  const Eigen::Index n = action.size();
  Vector row(n + 2);
  row(0) = 1.0;
  row.segment(1, n) = action;
  row(n + 1) = score(action, report);
  return row;
}

}  // namespace

double blind_band(int d, double delta) { return 4.0 * std::sqrt(static_cast<double>(d)) * delta; }

bool action_updated(const Vector& target, const Vector& report, double c) {
  return std::abs(score(target, report)) >= c;
}

bool region_updated(const Polytope& target, const Vector& report, double c) {
  Vector n(report.size() + 1);
  n.head(report.size()) = report;
  n(report.size()) = 1.0;
  const double tol = 10 * kTolerance * n.norm();
  bool upper = true, lower = true;
  for (const auto& v : target.vertices()) {
    const double s = n.dot(v);
    upper = upper && s >= c - tol;
    lower = lower && s <= -c + tol;
  }
  return upper || lower;
}

std::vector<double> ExactDiscreteOracle::evaluate(const OracleQuery& q, Rng& /*rng*/) {
  if (!q.discrete() || !q.sigma || !q.model) throw InvalidTarget("exact discrete oracle needs the action set and ground truth");
  const auto& actions = *q.actions;
  const auto& pi = *q.pi;
  std::vector<Vector> reports;
  reports.reserve(actions.size());
  for (const auto& a : actions) reports.push_back(best_response(a, *q.sigma, *q.model));
  std::vector<double> out;
  out.reserve(q.target_actions.size());
  for (std::size_t j : q.target_actions) {
    if (j >= actions.size()) throw InvalidTarget("target action index out of range");
    double p = 0.0;
    for (std::size_t i = 0; i < actions.size(); ++i)
      if (i == j || action_updated(actions[j], reports[i], q.threshold)) p += pi[i];
    out.push_back(clamp_probability(p));
  }
  return out;
}

std::vector<double> ExactContinuousOracle::evaluate(const OracleQuery& q, Rng& rng) {
  if (q.discrete() || !q.regions || !q.sigma || !q.model)
    throw InvalidTarget("exact continuous oracle needs the partition and ground truth");
  const auto& regions = *q.regions;
  const auto& pi = *q.pi;
  const Vector& x = q.sigma->x;
  const double radius = q.model->radius();

  std::vector<double> out(q.target_regions.size(), 1.0);
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < q.target_regions.size(); ++k) {
    const Polytope* target = q.target_regions[k];
    if (!target || !target->full_dimensional()) throw InvalidTarget("target region is empty");
    if (region_status(*target, x, radius, q.threshold) == Status::Ambiguous) open.push_back(k);
  }
  if (open.empty()) return out;

  std::vector<char> updated_at_truth(open.size());
  for (std::size_t k = 0; k < open.size(); ++k) updated_at_truth[k] = region_updated(*q.target_regions[open[k]], x, q.threshold);

  std::vector<double> hits(open.size(), 0.0);
  std::vector<std::size_t> hit_count(open.size());
  for (std::size_t s = 0; s < regions.size(); ++s) {
    if (pi[s] <= 0.0) continue;
    const auto n_s = static_cast<std::size_t>(std::ceil(static_cast<double>(samples_) * pi[s]));
    std::vector<Vector> draws = sample_uniform(regions[s], rng, n_s, 1'000'000);
    // The action actually played is one draw from its own stratum, which keeps
    // every region it updated at a positive estimate.
    if (s == q.chosen) draws.front() = q.chosen_action;
    std::size_t truthful = 0;
    std::fill(hit_count.begin(), hit_count.end(), 0);
    for (const auto& a : draws) {
      const Vector r = best_response(a, *q.sigma, *q.model);
      if (same_vector(r, x)) {
        ++truthful;
        continue;
      }
      for (std::size_t k = 0; k < open.size(); ++k)
        if (region_updated(*q.target_regions[open[k]], r, q.threshold)) ++hit_count[k];
    }
    for (std::size_t k = 0; k < open.size(); ++k) {
      const double count = static_cast<double>(hit_count[k]) + (updated_at_truth[k] ? static_cast<double>(truthful) : 0.0);
      hits[k] += pi[s] * count / static_cast<double>(n_s);
    }
  }
  for (std::size_t k = 0; k < open.size(); ++k) out[open[k]] = clamp_probability(hits[k]);
  return out;
}

NoisyOracle::NoisyOracle(std::unique_ptr<InProbOracle> inner, double epsilon)
    : inner_(std::move(inner)), epsilon_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw ConfigError("oracle.epsilon: must lie in [0, 1/2]");
  if (!inner_) throw ConfigError("oracle: noisy wrapper needs an inner oracle");
}

std::vector<double> NoisyOracle::evaluate(const OracleQuery& query, Rng& rng) {
  std::vector<double> values = inner_->evaluate(query, rng);
  if (epsilon_ == 0.0) return values;
  std::uniform_real_distribution<double> factor(1.0 - epsilon_, 1.0 + epsilon_);
  for (double& v : values) {
    const double exact = v;
    v = std::clamp(exact * factor(rng), std::numeric_limits<double>::min(), 1.0);
    ++calls_;
    if (std::abs(v - exact) > epsilon_ * exact * (1.0 + 1e-12)) ++violations_;
  }
  return values;
}

Eigen::MatrixXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& labels, const Eigen::VectorXd& row_weights,
                             Eigen::MatrixXd w, const LogisticSettings& settings) {
  const double total = row_weights.sum();
  if (!(total > 0.0)) return w;
  const Eigen::MatrixXd xt_weighted = (x.array().colwise() * (row_weights.array() / total)).matrix().transpose();
  for (int it = 0; it < settings.iterations; ++it) {
    const Eigen::MatrixXd p = ((-(x * w)).array().exp() + 1.0).inverse().matrix();
    const Eigen::MatrixXd grad = xt_weighted * (p - labels) + settings.l2 * w;
    w -= settings.step * grad;
  }
  return w;
}

double LogisticOracle::crude_bound(const OracleQuery& q, std::size_t target) {
  const auto& actions = *q.actions;
  const auto& pi = *q.pi;
  double c = pi[target];
  if (!action_updated(actions[target], q.report, q.threshold)) return c;
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (i != target && action_updated(actions[i], q.report, q.threshold)) c += pi[i];
  return clamp_probability(c);
}

Eigen::MatrixXd LogisticOracle::design(const std::vector<Vector>& actions, const Vector& report) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(actions.size()), actions.front().size() + 2);
  for (std::size_t i = 0; i < actions.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = design_row(actions[i], report);
  return x;
}

Eigen::VectorXd LogisticOracle::recency_weights() const {
  const auto n = static_cast<Eigen::Index>(rows_.size());
  Eigen::VectorXd w(n);
  for (Eigen::Index k = 0; k < n; ++k) w(k) = std::pow(settings_.recency, static_cast<double>(n - 1 - k));
  return w;
}

std::vector<double> LogisticOracle::evaluate(const OracleQuery& query, Rng& /*rng*/) {
  return query.discrete() ? evaluate_discrete(query) : evaluate_continuous(query);
}

std::vector<double> LogisticOracle::evaluate_discrete(const OracleQuery& q) {
  const auto& actions = *q.actions;
  const auto& pi = *q.pi;
  std::vector<double> out;
  out.reserve(q.target_actions.size());
  for (std::size_t j : q.target_actions) {
    if (j >= actions.size()) throw InvalidTarget("target action index out of range");
    out.push_back(crude_bound(q, j));
  }
  if (rows_.empty() || q.target_actions.empty()) return out;

  const Eigen::Index features = actions.front().size() + 2;
  if (weights_.cols() != static_cast<Eigen::Index>(actions.size())) weights_ = Eigen::MatrixXd::Zero(features, static_cast<Eigen::Index>(actions.size()));

  const auto n = static_cast<Eigen::Index>(rows_.size());
  const auto m = static_cast<Eigen::Index>(q.target_actions.size());
  Eigen::MatrixXd x(n, features);
  Eigen::MatrixXd labels(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Row& row = rows_[static_cast<std::size_t>(r)];
    x.row(r) = design_row(row.action, row.report);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Vector& target = actions[q.target_actions[static_cast<std::size_t>(k)]];
      labels(r, k) = same_vector(target, row.action) || action_updated(target, row.report, threshold_) ? 1.0 : 0.0;
    }
  }
  Eigen::MatrixXd init(features, m);
  for (Eigen::Index k = 0; k < m; ++k) init.col(k) = weights_.col(static_cast<Eigen::Index>(q.target_actions[static_cast<std::size_t>(k)]));
  const Eigen::MatrixXd w = fit_logistic(x, labels, recency_weights(), std::move(init), settings_);
  for (Eigen::Index k = 0; k < m; ++k) weights_.col(static_cast<Eigen::Index>(q.target_actions[static_cast<std::size_t>(k)])) = w.col(k);

  const Eigen::MatrixXd logits = design(actions, q.report) * w;
  Eigen::VectorXd pi_vec = Eigen::Map<const Eigen::VectorXd>(pi.data(), static_cast<Eigen::Index>(pi.size()));
  for (Eigen::Index k = 0; k < m; ++k) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) v += pi_vec(i) / (1.0 + std::exp(-logits(i, k)));
    if (std::isfinite(v)) out[static_cast<std::size_t>(k)] = clamp_probability(std::max(v, out[static_cast<std::size_t>(k)]));
  }
  return out;
}

std::vector<double> LogisticOracle::evaluate_continuous(const OracleQuery& q) {
  const auto& regions = *q.regions;
  const auto& pi = *q.pi;
  const double floor = std::max(q.updated_mass, pi[q.chosen] * std::numeric_limits<double>::epsilon());
  std::vector<double> out(q.target_regions.size(), clamp_probability(floor));
  if (rows_.empty() || q.target_regions.empty()) return out;

  const auto n = static_cast<Eigen::Index>(rows_.size());
  const auto m = static_cast<Eigen::Index>(q.target_regions.size());
  const Eigen::Index features = q.chosen_action.size() + 2;
  Eigen::MatrixXd x(n, features);
  Eigen::MatrixXd labels(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Row& row = rows_[static_cast<std::size_t>(r)];
    x.row(r) = design_row(row.action, row.report);
    for (Eigen::Index k = 0; k < m; ++k)
      labels(r, k) = region_updated(*q.target_regions[static_cast<std::size_t>(k)], row.report, threshold_) ? 1.0 : 0.0;
  }
  const Eigen::MatrixXd w = fit_logistic(x, labels, recency_weights(), Eigen::MatrixXd::Zero(features, m), settings_);
  std::vector<Vector> centers;
  centers.reserve(regions.size());
  for (const auto& p : regions) centers.push_back(p.vertex_centroid());
  const Eigen::MatrixXd logits = design(centers, q.report) * w;
  for (Eigen::Index k = 0; k < m; ++k) {
    double v = 0.0;
    for (Eigen::Index s = 0; s < logits.rows(); ++s) v += pi[static_cast<std::size_t>(s)] / (1.0 + std::exp(-logits(s, k)));
    if (std::isfinite(v)) out[static_cast<std::size_t>(k)] = clamp_probability(std::max(v, out[static_cast<std::size_t>(k)]));
  }
  return out;
}

void LogisticOracle::observe(const OracleQuery& q) {
  threshold_ = q.threshold;
  rows_.push_back({q.chosen_action, q.report});
  while (rows_.size() > settings_.window) rows_.pop_front();
}

std::string_view to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::Exact: return "exact";
    case OracleKind::Noisy: return "noisy";
    case OracleKind::Logistic: return "logistic";
  }
  return "unknown";
}

OracleKind oracle_kind_from_string(std::string_view name) {
  if (name == "exact") return OracleKind::Exact;
  if (name == "noisy") return OracleKind::Noisy;
  if (name == "logistic") return OracleKind::Logistic;
  throw ConfigError("oracle.kind: unknown kind '" + std::string(name) + "'");
}

void OracleConfig::validate() const {
  if (kind == OracleKind::Noisy && !(epsilon >= 0.0 && epsilon <= 0.5))
    throw ConfigError("oracle.epsilon: must lie in [0, 1/2]");
  if (mc_samples == 0) throw ConfigError("oracle.mc_samples: must be positive");
  if (!(logistic.recency > 0.0 && logistic.recency <= 1.0)) throw ConfigError("oracle.recency: must lie in (0, 1]");
  if (logistic.window == 0) throw ConfigError("oracle.window: must be positive");
  if (logistic.iterations < 0) throw ConfigError("oracle.iterations: must be non-negative");
  if (!(logistic.step > 0.0)) throw ConfigError("oracle.step: must be positive");
  if (!(logistic.l2 >= 0.0)) throw ConfigError("oracle.l2: must be non-negative");
}

std::unique_ptr<InProbOracle> make_oracle(const OracleConfig& config, bool discrete) {
  config.validate();
  auto exact = [&]() -> std::unique_ptr<InProbOracle> {
    if (discrete) return std::make_unique<ExactDiscreteOracle>();
    return std::make_unique<ExactContinuousOracle>(config.mc_samples);
  };
  switch (config.kind) {
    case OracleKind::Exact: return exact();
    case OracleKind::Noisy: return std::make_unique<NoisyOracle>(exact(), config.epsilon);
    case OracleKind::Logistic: return std::make_unique<LogisticOracle>(config.logistic);
  }
  throw ConfigError("oracle.kind: unsupported");
}

}  // namespace grinder
