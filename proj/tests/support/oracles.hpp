#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;

inline Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

inline double score(const Vec& alpha, const Vec& z) {
  double s = alpha(alpha.size() - 1);
  for (Eigen::Index i = 0; i < z.size(); ++i) s += alpha(i) * z(i);
  return s;
}

/// Prediction is +1 on the closed positive side; loss counts a wrong prediction.
inline int loss(const Vec& alpha, const Vec& z, int y) { return (score(alpha, z) >= 0.0 ? 1 : -1) != y ? 1 : 0; }

/// Area of a convex polygon given its vertices in any order.
inline double shoelace(std::vector<Vec> pts) {
  if (pts.size() < 3) return 0.0;
  Vec c = Vec::Zero(2);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec& a, const Vec& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  double area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec& a = pts[i];
    const Vec& b = pts[(i + 1) % pts.size()];
    area += a(0) * b(1) - a(1) * b(0);
  }
  return std::abs(area) / 2.0;
}

/// Midpoint-rule volume of {w in [-1,1]^3 : inside(w)} on an n^3 grid.
inline double grid_volume(int n, const std::function<bool(const Vec&)>& inside) {
  const double h = 2.0 / n;
  Vec w(3);
  long count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        w << -1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h, -1.0 + (k + 0.5) * h;
        count += inside(w) ? 1 : 0;
      }
  return static_cast<double>(count) * h * h * h;
}

/// Indicator-value utility: value when classified +1, minus Euclidean cost.
inline double indicator_utility(const Vec& alpha, const Vec& x, const Vec& z, double value) {
  return (score(alpha, z) >= 0.0 ? value : 0.0) - (z - x).norm();
}

/// Grid search over the ball of radius `delta` around x intersected with the
/// unit box. Prefers the truthful report on ties, then smaller moves.
inline Vec grid_best_response(const Vec& x, double delta, double step, const std::function<double(const Vec&)>& u) {
  const int reach = static_cast<int>(std::floor(delta / step + 1e-9));
  Vec best = x;
  double best_u = u(x), best_d = 0.0;
  Vec z(2);
  for (int i = -reach; i <= reach; ++i)
    for (int j = -reach; j <= reach; ++j) {
      z << x(0) + i * step, x(1) + j * step;
      const double d = (z - x).norm();
      if (d > delta + 1e-12 || z.minCoeff() < 0.0 || z.maxCoeff() > 1.0) continue;
      const double val = u(z);
      if (val > best_u + 1e-12 || (std::abs(val - best_u) <= 1e-12 && d < best_d)) {
        best = z;
        best_u = val;
        best_d = d;
      }
    }
  return best;
}

/// Indicator-value best response computed by hand for d = 2: stay if already
/// positive, else move to the nearest point of the hyperplane when it is close
/// and cheap enough.
inline Vec indicator_response(const Vec& alpha, const Vec& x, double delta, double value) {
  if (score(alpha, x) >= 0.0) return x;
  const Vec a = alpha.head(2);
  const double dist = -score(alpha, x) / a.norm();
  if (dist > delta || dist >= value) return x;
  const Vec unit = a / a.norm();
  Vec z = x + dist * unit;
  // Land on the closed positive side despite rounding.
  for (double nudge = 1e-16; score(alpha, z) < 0.0; nudge *= 2.0) z += nudge * unit;
  if (z.minCoeff() < 0.0 || z.maxCoeff() > 1.0) return x;  // callers avoid this case
  return z;
}

/// External and Stackelberg regret straight from their definitions over a
/// finite table: loss(m, a, b) is the learner's loss playing a against type m
/// answering b.
struct Regrets {
  double external;
  double stackelberg;
};

inline Regrets finite_regrets(const std::function<double(std::size_t, std::size_t, std::size_t)>& loss_of, std::size_t k,
                              const std::vector<std::pair<std::size_t, std::size_t>>& seq) {
  double realized = 0.0;
  for (const auto& [a, m] : seq) realized += loss_of(m, a, a);
  double best_ext = INFINITY, best_st = INFINITY;
  for (std::size_t c = 0; c < k; ++c) {
    double e = 0.0, s = 0.0;
    for (const auto& [a, m] : seq) {
      e += loss_of(m, c, a);
      s += loss_of(m, c, c);
    }
    best_ext = std::min(best_ext, e);
    best_st = std::min(best_st, s);
  }
  return {realized - best_ext, realized - best_st};
}

/// sum_{i<=d+1} C(2t, i), built row by row with Pascal's rule.
inline double cell_bound(int d, std::size_t t) {
  const std::size_t n = 2 * t;
  std::vector<double> row(static_cast<std::size_t>(d) + 2, 0.0);
  row[0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t i = std::min<std::size_t>(r, row.size() - 1); i >= 1; --i) row[i] += row[i - 1];
  double total = 0.0;
  for (double x : row) total += x;
  return total;
}

}  // namespace oracle
