#include "grinder/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <set>
#include <string>

#include "grinder/error.hpp"

namespace grinder {

namespace {

int rank_of_rows(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s(0));
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) ++r;
  return r;
}

std::vector<int> sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Vector centroid_of(const std::vector<Vector>& v, const std::vector<int>& idx) {
  Vector c = Vector::Zero(v[idx.front()].size());
  for (int i : idx) c += v[i];
  return c / static_cast<double>(idx.size());
}

double distance_to_affine_hull(const Vector& point, const std::vector<Vector>& v, const std::vector<int>& idx) {
  const Vector& base = v[idx.front()];
  if (idx.size() == 1) return (point - base).norm();
  Eigen::MatrixXd a(base.size(), static_cast<Eigen::Index>(idx.size() - 1));
  for (std::size_t i = 1; i < idx.size(); ++i) a.col(static_cast<Eigen::Index>(i - 1)) = v[idx[i]] - base;
  // Rank decided with the same tolerance as affine_rank; a decomposition with
  // its default threshold would treat rounding noise as an extra direction.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-9 * std::max(1.0, sv(0));
  Vector r = point - base;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) r -= svd.matrixU().col(i).dot(r) * svd.matrixU().col(i);
  return r.norm();
}

// k-dimensional measure of the face spanned by vertex subset `s`, by summing
// pyramids over its (k-1)-faces. Every (k-1)-face of a face is its
// intersection with some facet of the polytope.
double face_measure(const std::vector<Vector>& v, const std::vector<std::vector<int>>& facets,
                    const std::vector<int>& s, int k) {
  if (k == 0) return 1.0;
  if (k == 1) {
    double longest = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) longest = std::max(longest, (v[s[i]] - v[s[j]]).norm());
    return longest;
  }
  const Vector c = centroid_of(v, s);
  std::set<std::vector<int>> seen;
  double total = 0.0;
  for (const auto& f : facets) {
    std::vector<int> t = sorted_intersection(s, f);
    if (static_cast<int>(t.size()) < k || t.size() == s.size()) continue;
    if (!seen.insert(t).second) continue;
    std::vector<Vector> pts;
    pts.reserve(t.size());
    for (int i : t) pts.push_back(v[i]);
    if (affine_rank(pts) != k - 1) continue;
    total += distance_to_affine_hull(c, v, t) * face_measure(v, facets, t, k - 1);
  }
  return total / k;
}

double exact_volume(const std::vector<Vector>& vertices, const std::vector<std::vector<int>>& incidence,
                    std::size_t n_halfspaces, int dim) {
  std::vector<std::vector<int>> facets(n_halfspaces);
  for (std::size_t i = 0; i < incidence.size(); ++i)
    for (int h : incidence[i]) facets[h].push_back(static_cast<int>(i));
  std::vector<int> all(vertices.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return face_measure(vertices, facets, all, dim);
}

void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

int affine_rank(const std::vector<Vector>& points, double tol) {
  if (points.empty()) return -1;
  if (points.size() == 1) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size() - 1), points.front().size());
  for (std::size_t i = 1; i < points.size(); ++i) m.row(static_cast<Eigen::Index>(i - 1)) = points[i] - points[0];
  return rank_of_rows(m, tol);
}

Halfspace Halfspace::make(const Vector& normal, double offset) {
  const double norm = normal.norm();
  if (!(norm > 0.0) || !std::isfinite(norm) || !std::isfinite(offset))
    throw InvalidHalfspace("halfspace normal must be finite and non-zero");
  return {normal / norm, offset / norm};
}

Polytope::Polytope(int dim, std::vector<Halfspace> halfspaces, std::vector<Vector> vertices,
                   std::vector<std::vector<int>> incidence)
    : dim_(dim), halfspaces_(std::move(halfspaces)), vertices_(std::move(vertices)), incidence_(std::move(incidence)) {
  prune_and_measure();
}

void Polytope::prune_and_measure() {
  full_dim_ = affine_rank(vertices_) == dim_;
  if (!full_dim_) {
    volume_ = 0.0;
    return;
  }
  std::vector<std::vector<Vector>> on_facet(halfspaces_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (int h : incidence_[i]) on_facet[h].push_back(vertices_[i]);
  std::vector<int> remap(halfspaces_.size(), -1);
  std::vector<Halfspace> kept;
  for (std::size_t h = 0; h < halfspaces_.size(); ++h) {
    if (affine_rank(on_facet[h]) == dim_ - 1) {
      remap[h] = static_cast<int>(kept.size());
      kept.push_back(std::move(halfspaces_[h]));
    }
  }
  halfspaces_ = std::move(kept);
  for (auto& inc : incidence_) {
    std::vector<int> next;
    for (int h : inc)
      if (remap[h] >= 0) next.push_back(remap[h]);
    inc = std::move(next);
  }
  if (dim_ <= kMaxExactDim) volume_ = exact_volume(vertices_, incidence_, halfspaces_.size(), dim_);
}

Polytope Polytope::box(const Vector& lower, const Vector& upper) {
  if (lower.size() != upper.size() || lower.size() == 0) throw EmptyRegion("box bounds must share a positive dimension");
  const int dim = static_cast<int>(lower.size());
  std::vector<Halfspace> hs;
  for (int i = 0; i < dim; ++i) {
    Vector e = Vector::Zero(dim);
    e(i) = 1.0;
    hs.push_back({e, upper(i)});
    hs.push_back({-e, -lower(i)});
  }
  return from_halfspaces(dim, std::move(hs));
}

Polytope Polytope::cube(int dim, double half_width) {
  return box(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width));
}

Polytope Polytope::from_halfspaces(int dim, std::vector<Halfspace> halfspaces, double tol) {
  if (dim <= 0) throw UnsupportedDimension("dimension must be positive");
  for (auto& h : halfspaces) {
    if (h.normal.size() != dim) throw InvalidHalfspace("halfspace dimension mismatch");
    h = Halfspace::make(h.normal, h.offset);
  }
  const int m = static_cast<int>(halfspaces.size());
  std::vector<Vector> vertices;
  for_each_combination(m, dim, [&](const std::vector<int>& idx) {
    Eigen::MatrixXd a(dim, dim);
    Vector b(dim);
    for (int r = 0; r < dim; ++r) {
      a.row(r) = halfspaces[idx[r]].normal.transpose();
      b(r) = halfspaces[idx[r]].offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (lu.rank() < dim) return;
    Vector x = lu.solve(b);
    for (const auto& h : halfspaces)
      if (h.slack(x) > tol) return;
    for (const auto& v : vertices)
      if ((v - x).norm() <= 10 * tol) return;
    vertices.push_back(std::move(x));
  });
  if (vertices.empty()) throw EmptyRegion("halfspaces have no common point");
  std::vector<std::vector<int>> incidence(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (int h = 0; h < m; ++h)
      if (std::abs(halfspaces[h].slack(vertices[i])) <= 10 * tol) incidence[i].push_back(h);
  return Polytope(dim, std::move(halfspaces), std::move(vertices), std::move(incidence));
}

Vector Polytope::vertex_centroid() const {
  Vector c = Vector::Zero(dim_);
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

PolytopeSplit Polytope::split(const Halfspace& h, double tol) const {
  if (h.normal.size() != dim_) throw InvalidHalfspace("halfspace dimension mismatch");
  const Halfspace cut = Halfspace::make(h.normal, h.offset);
  if (!full_dim_) return {};

  const std::size_t n = vertices_.size();
  std::vector<double> s(n);
  double smin = INFINITY, smax = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = cut.slack(vertices_[i]);
    smin = std::min(smin, s[i]);
    smax = std::max(smax, s[i]);
  }
  if (smax <= tol) return {std::optional<Polytope>(*this), std::nullopt};
  if (smin >= -tol) return {std::nullopt, std::optional<Polytope>(*this)};

  const int cut_index = static_cast<int>(halfspaces_.size());
  std::vector<Vector> fresh;
  std::vector<std::vector<int>> fresh_inc;
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] >= -tol) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (s[j] <= tol) continue;
      std::vector<int> common = sorted_intersection(incidence_[i], incidence_[j]);
      if (static_cast<int>(common.size()) < dim_ - 1) continue;
      Eigen::MatrixXd normals(static_cast<Eigen::Index>(common.size()), dim_);
      for (std::size_t r = 0; r < common.size(); ++r) normals.row(static_cast<Eigen::Index>(r)) = halfspaces_[common[r]].normal;
      if (rank_of_rows(normals, 1e-9) != dim_ - 1) continue;
      const double t = s[i] / (s[i] - s[j]);
      Vector x = vertices_[i] + t * (vertices_[j] - vertices_[i]);
      bool duplicate = false;
      for (const auto& f : fresh) duplicate = duplicate || (f - x).norm() <= 10 * tol;
      if (duplicate) continue;
      common.push_back(cut_index);
      fresh.push_back(std::move(x));
      fresh_inc.push_back(std::move(common));
    }
  }

  auto build = [&](bool inside) -> std::optional<Polytope> {
    std::vector<Halfspace> hs = halfspaces_;
    hs.push_back(inside ? cut : cut.complement());
    std::vector<Vector> verts;
    std::vector<std::vector<int>> inc;
    for (std::size_t i = 0; i < n; ++i) {
      const bool keep = inside ? s[i] <= tol : s[i] >= -tol;
      if (!keep) continue;
      verts.push_back(vertices_[i]);
      inc.push_back(incidence_[i]);
      if (std::abs(s[i]) <= tol) inc.back().push_back(cut_index);
    }
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      verts.push_back(fresh[k]);
      inc.push_back(fresh_inc[k]);
    }
    // Every cut of a partition can pass through the same point, so a vertex may
    // lie on halfspaces that are not among the facets of the edge it came from.
    for (std::size_t i = 0; i < verts.size(); ++i) {
      inc[i].clear();
      for (std::size_t k = 0; k < hs.size(); ++k)
        if (std::abs(hs[k].slack(verts[i])) <= 10 * tol) inc[i].push_back(static_cast<int>(k));
    }
    Polytope piece(dim_, std::move(hs), std::move(verts), std::move(inc));
    if (!piece.full_dim_) return std::nullopt;
    return piece;
  };
  return {build(true), build(false)};
}

std::optional<Polytope> intersect_halfspace(const Polytope& p, const Halfspace& h, double tol) {
  return p.split(h, tol).inside;
}

double volume(const Polytope& p, const VolumeOptions& options) {
  if (!p.full_dimensional()) return 0.0;
  if (p.dim() <= options.max_exact_dim) {
    if (auto v = p.cached_volume()) return *v;
    return exact_volume(p.vertices(), p.incidence(), p.halfspaces().size(), p.dim());
  }
  if (!options.monte_carlo_fallback)
    throw UnsupportedDimension("exact volume is limited to dimension " + std::to_string(options.max_exact_dim) +
                               ", got " + std::to_string(p.dim()));
  Rng rng(options.seed);
  return monte_carlo_volume(p, options.mc_samples, rng).first;
}

bool contains(const Polytope& p, const Vector& w, double tol) {
  if (w.size() != p.dim()) return false;
  for (const auto& h : p.halfspaces())
    if (h.slack(w) > tol) return false;
  return true;
}

BoundingBox bounding_box(const Polytope& p) {
  if (p.vertices().empty()) throw EmptyRegion("bounding box of an empty polytope");
  BoundingBox box{p.vertices().front(), p.vertices().front()};
  for (const auto& v : p.vertices()) {
    box.lower = box.lower.cwiseMin(v);
    box.upper = box.upper.cwiseMax(v);
  }
  return box;
}

std::vector<Vector> sample_uniform(const Polytope& p, Rng& rng, std::size_t count, std::size_t budget) {
  if (!p.full_dimensional()) throw SamplingFailure("cannot sample a polytope with zero volume");
  const BoundingBox box = bounding_box(p);
  const Vector width = box.upper - box.lower;
  std::vector<Vector> out;
  out.reserve(count);
  Vector w(p.dim());
  while (out.size() < count) {
    std::size_t attempt = 0;
    for (; attempt < budget; ++attempt) {
      for (int i = 0; i < p.dim(); ++i) w(i) = box.lower(i) + width(i) * uniform01(rng);
      if (contains(p, w, 0.0)) break;
    }
    if (attempt == budget) throw SamplingFailure("rejection budget of " + std::to_string(budget) + " proposals exhausted");
    out.push_back(w);
  }
  return out;
}

Vector sample_uniform(const Polytope& p, Rng& rng, std::size_t budget) {
  return std::move(sample_uniform(p, rng, 1, budget).front());
}

std::pair<double, double> monte_carlo_volume(const Polytope& p, std::size_t samples, Rng& rng) {
  if (!p.full_dimensional() || samples == 0) return {0.0, 0.0};
  const BoundingBox box = bounding_box(p);
  const Vector width = box.upper - box.lower;
  std::size_t hits = 0;
  Vector w(p.dim());
  for (std::size_t k = 0; k < samples; ++k) {
    for (int i = 0; i < p.dim(); ++i) w(i) = box.lower(i) + width(i) * uniform01(rng);
    if (contains(p, w, 0.0)) ++hits;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  const double bv = box.volume();
  return {bv * frac, bv * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples))};
}

}  // namespace grinder
