#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "grinder/types.hpp"

namespace grinder {

inline constexpr double kTolerance = 1e-9;
inline constexpr int kMaxExactDim = 4;

/// Closed halfspace {w : <normal, w> <= offset}. The normal is stored with unit length.
struct Halfspace {
  Vector normal;
  double offset = 0.0;

  /// Normalizes (normal, offset) jointly. Throws InvalidHalfspace on a zero or non-finite normal.
  static Halfspace make(const Vector& normal, double offset);

  Halfspace complement() const { return {-normal, -offset}; }
  double slack(const Vector& w) const { return normal.dot(w) - offset; }
};

struct BoundingBox {
  Vector lower;
  Vector upper;

  double volume() const { return (upper - lower).prod(); }
};

struct VolumeOptions {
  int max_exact_dim = kMaxExactDim;
  bool monte_carlo_fallback = false;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
};

struct PolytopeSplit;

/// Bounded convex polytope in H-representation.
///
/// Vertices and their incident halfspaces are kept alongside the halfspaces, so
/// splitting by a hyperplane only touches the edges it crosses. Halfspaces that
/// do not support a facet are pruned whenever a polytope is built.
class Polytope {
 public:
  static Polytope box(const Vector& lower, const Vector& upper);
  static Polytope cube(int dim, double half_width = 1.0);

  /// Vertex enumeration over all dim-subsets of the halfspaces. Lower-dimensional
  /// results are allowed (volume 0). Throws EmptyRegion when nothing is feasible.
  static Polytope from_halfspaces(int dim, std::vector<Halfspace> halfspaces, double tol = kTolerance);

  int dim() const { return dim_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  /// Indices (into halfspaces()) of the halfspaces tight at each vertex, sorted.
  const std::vector<std::vector<int>>& incidence() const { return incidence_; }
  bool full_dimensional() const { return full_dim_; }
  std::optional<double> cached_volume() const { return volume_; }

  std::uint64_t id() const { return id_; }
  void set_id(std::uint64_t id) { id_ = id; }

  /// Average of the vertices; an interior point for full-dimensional polytopes.
  Vector vertex_centroid() const;

  /// Both pieces of the cut. A piece without interior at `tol` is reported empty.
  PolytopeSplit split(const Halfspace& h, double tol = kTolerance) const;

 private:
  Polytope(int dim, std::vector<Halfspace> halfspaces, std::vector<Vector> vertices,
           std::vector<std::vector<int>> incidence);

  void prune_and_measure();

  int dim_ = 0;
  std::vector<Halfspace> halfspaces_;
  std::vector<Vector> vertices_;
  std::vector<std::vector<int>> incidence_;
  bool full_dim_ = false;
  std::optional<double> volume_;
  std::uint64_t id_ = 0;
};

struct PolytopeSplit {
  std::optional<Polytope> inside;   // part with <n,w> <= o
  std::optional<Polytope> outside;  // part with <n,w> >= o
};

std::optional<Polytope> intersect_halfspace(const Polytope& p, const Halfspace& h, double tol = kTolerance);

/// Lebesgue measure. Exact up to `max_exact_dim`; beyond it either throws
/// UnsupportedDimension or, if enabled, returns a Monte-Carlo estimate.
double volume(const Polytope& p, const VolumeOptions& options = {});

bool contains(const Polytope& p, const Vector& w, double tol = kTolerance);

BoundingBox bounding_box(const Polytope& p);

/// Rejection sampling from the bounding box. Throws SamplingFailure on a
/// zero-volume polytope or when `budget` proposals are all rejected.
Vector sample_uniform(const Polytope& p, Rng& rng, std::size_t budget = 1'000'000);

/// `count` independent uniform points, sharing one bounding box computation.
std::vector<Vector> sample_uniform(const Polytope& p, Rng& rng, std::size_t count, std::size_t budget);

/// Box-sampling estimate with its standard error.
std::pair<double, double> monte_carlo_volume(const Polytope& p, std::size_t samples, Rng& rng);

/// Dimension of the affine hull of the given points (-1 for an empty set).
int affine_rank(const std::vector<Vector>& points, double tol = 1e-9);

}  // namespace grinder
