#include "grinder/agents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grinder/error.hpp"

namespace grinder {

namespace {

Vector clamp_box(const Vector& v) { return v.cwiseMax(0.0).cwiseMin(1.0); }

// Largest step along `dir` after which clamp(x + mu * dir) stops changing.
double saturation_step(const Vector& x, const Vector& dir) {
  double mu = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dir(i) > 0.0) mu = std::max(mu, (1.0 - x(i)) / dir(i));
    if (dir(i) < 0.0) mu = std::max(mu, -x(i) / dir(i));
  }
  return mu;
}

Vector linear_value_response(const Vector& alpha, const LabeledPoint& sigma, const AgentModel& model) {
  const Eigen::Index d = sigma.x.size();
  const Vector a = alpha.head(d);
  if (a.norm() == 0.0) return sigma.x;
  const Vector lo = -sigma.x;
  const Vector hi = Vector::Ones(d) - sigma.x;
  // Maximizers of <a, s> over the ball of each radius intersected with the box
  // lie on this path; the utility is unimodal along it.
  auto step = [&](double mu) -> Vector { return (mu * a).cwiseMax(lo).cwiseMin(hi); };
  auto gain = [&](double mu) {
    const Vector s = step(mu);
    return model.value_coeff * a.dot(s) - s.norm();
  };
  double mu_hi = saturation_step(sigma.x, a);
  if (step(mu_hi).norm() > model.delta) {
    double lo_mu = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo_mu + mu_hi);
      (step(mid).norm() > model.delta ? mu_hi : lo_mu) = mid;
    }
    mu_hi = lo_mu;
  }
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double l = 0.0, r = mu_hi;
  double m1 = r - phi * (r - l), m2 = l + phi * (r - l);
  double g1 = gain(m1), g2 = gain(m2);
  for (int it = 0; it < 200 && r - l > 1e-15; ++it) {
    if (g1 < g2) {
      l = m1;
      m1 = m2;
      g1 = g2;
      m2 = l + phi * (r - l);
      g2 = gain(m2);
    } else {
      r = m2;
      m2 = m1;
      g2 = g1;
      m1 = r - phi * (r - l);
      g1 = gain(m1);
    }
  }
  double best_mu = g1 >= g2 ? m1 : m2;
  if (gain(mu_hi) > gain(best_mu)) best_mu = mu_hi;
  if (gain(best_mu) <= 1e-12) return sigma.x;
  return sigma.x + step(best_mu);
}

}  // namespace

Vector LabeledPoint::lifted() const {
  Vector v(x.size() + 1);
  v.head(x.size()) = x;
  v(x.size()) = 1.0;
  return v;
}

std::string_view to_string(AgentFamily family) {
  switch (family) {
    case AgentFamily::IndicatorValue: return "indicator";
    case AgentFamily::LinearValue: return "linear";
    case AgentFamily::Truthful: return "truthful";
    case AgentFamily::Adversarial: return "adversarial";
  }
  return "unknown";
}

AgentFamily agent_family_from_string(std::string_view name) {
  if (name == "indicator") return AgentFamily::IndicatorValue;
  if (name == "linear") return AgentFamily::LinearValue;
  if (name == "truthful") return AgentFamily::Truthful;
  if (name == "adversarial") return AgentFamily::Adversarial;
  throw ConfigError("agent.family: unknown family '" + std::string(name) + "'");
}

void AgentModel::validate() const {
  if (family == AgentFamily::Truthful) return;
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("agent.delta: must lie in (0, 1]");
  if (!(value_coeff >= 0.0)) throw ConfigError("agent.value_coeff: must be non-negative");
}

double score(const Vector& alpha, const Vector& z) {
  const Eigen::Index d = z.size();
  return alpha.head(d).dot(z) + alpha(d);
}

std::optional<Vector> min_cost_crossing(const Vector& alpha, const Vector& x, bool positive, double margin) {
  auto satisfied = [&](const Vector& z) { return positive ? score(alpha, z) >= margin : score(alpha, z) <= -margin; };
  if (satisfied(x)) return x;
  const Eigen::Index d = x.size();
  const Vector dir = positive ? Vector(alpha.head(d)) : Vector(-alpha.head(d));
  if (dir.norm() == 0.0) return std::nullopt;
  // Unclipped projection first; it is the answer whenever it stays in the box.
  const Vector a = alpha.head(d);
  const double goal = positive ? margin : -margin;
  const Vector proj = x + ((goal - score(alpha, x)) / a.squaredNorm()) * a;
  if ((proj.array() >= 0.0).all() && (proj.array() <= 1.0).all() && satisfied(proj)) return proj;
  auto at = [&](double mu) { return clamp_box(x + mu * dir); };
  double hi = saturation_step(x, dir);
  if (!satisfied(at(hi))) return std::nullopt;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (satisfied(at(mid)) ? hi : lo) = mid;
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
  }
  return at(hi);
}

double utility(const Vector& alpha, const LabeledPoint& sigma, const AgentModel& model, const Vector& z) {
  const double cost = (z - sigma.x).norm();
  switch (model.family) {
    case AgentFamily::IndicatorValue: return (score(alpha, z) >= 0.0 ? model.value_coeff : 0.0) - cost;
    case AgentFamily::LinearValue: return model.value_coeff * score(alpha, z) - cost;
    case AgentFamily::Truthful: return -cost;
    case AgentFamily::Adversarial: return binary_loss(alpha, z, sigma.y);
  }
  return 0.0;
}

Vector best_response(const Vector& alpha, const LabeledPoint& sigma, const AgentModel& model) {
  switch (model.family) {
    case AgentFamily::Truthful: return sigma.x;
    case AgentFamily::LinearValue: return linear_value_response(alpha, sigma, model);
    case AgentFamily::IndicatorValue: {
      if (score(alpha, sigma.x) >= 0.0) return sigma.x;
      const auto z = min_cost_crossing(alpha, sigma.x, true);
      if (!z) return sigma.x;
      const double cost = (*z - sigma.x).norm();
      return cost <= model.delta && cost < model.value_coeff ? *z : sigma.x;
    }
    case AgentFamily::Adversarial: {
      if (binary_loss(alpha, sigma.x, sigma.y) == 1) return sigma.x;
      const auto z = min_cost_crossing(alpha, sigma.x, sigma.y == Label::Negative, kStrictMargin);
      return z && (*z - sigma.x).norm() <= model.delta ? *z : sigma.x;
    }
  }
  return sigma.x;
}

Vector brute_force_best_response(const Vector& alpha, const LabeledPoint& sigma, const AgentModel& model,
                                 double grid_step) {
  const double radius = model.radius();
  const int d = static_cast<int>(sigma.x.size());
  const int reach = static_cast<int>(std::floor(radius / grid_step + 1e-9));
  Vector best = sigma.x;
  double best_u = utility(alpha, sigma, model, best);
  double best_dist = 0.0;
  std::vector<int> k(static_cast<std::size_t>(d), -reach);
  Vector z(d);
  while (true) {
    for (int i = 0; i < d; ++i) z(i) = sigma.x(i) + k[i] * grid_step;
    const double dist = (z - sigma.x).norm();
    if (dist <= radius + 1e-12 && (z.array() >= 0.0).all() && (z.array() <= 1.0).all()) {
      const double u = utility(alpha, sigma, model, z);
      // Lexicographic ties resolve to the first point visited.
      if (u > best_u + 1e-12 || (std::abs(u - best_u) <= 1e-12 && dist < best_dist - 1e-15)) {
        best = z;
        best_u = u;
        best_dist = dist;
      }
    }
    int i = d - 1;
    while (i >= 0 && k[i] == reach) k[i--] = -reach;
    if (i < 0) break;
    ++k[i];
  }
  return best;
}

int binary_loss(const Vector& alpha, const Vector& report, Label y) {
  // The prediction is sgn(score) with sgn(0) = +1, so a report on the
  // boundary is classified +1 and counts as a mistake for y = -1.
  return sgn(score(alpha, report)) != sign(y) ? 1 : 0;
}

double hinge_loss(const Vector& alpha, const Vector& report, Label y) {
  return std::max(0.0, 1.0 - sign(y) * score(alpha, report));
}

double quadratic_utility(const Vector& alpha_bar, const Vector& x, const Vector& z) {
  return alpha_bar.dot(z) - (x - z).squaredNorm();
}

}  // namespace grinder
