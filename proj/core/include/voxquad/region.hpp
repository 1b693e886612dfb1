#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "voxquad/geometry.hpp"
#include "voxquad/mesh.hpp"

namespace voxquad {

using ScalarField = std::function<double(Point)>;

enum class RegionKind { Ball, HalfPlane, Generic };

struct Ball {
  Point center;
  double radius = 0.0;
};

/// Points x with dot(normal, x) < offset. `normal` is stored normalized.
struct HalfPlane {
  Point normal;
  double offset = 0.0;
};

/// The discontinuity set K, described by a signed distance (negative inside).
/// The indicator is 1 exactly where the signed distance is negative, so K is
/// treated as an open set.
class RegionSet {
 public:
  static RegionSet ball(Point center, double radius);
  static RegionSet half_plane(Point normal, double offset);
  /// `lipschitz_bound` >= 1 scales the safety margins used for classification.
  /// `curvature_bound` bounds the Hessian of the signed distance near the
  /// interface; the reference integrator uses it to find crossings that miss
  /// every sample point. Zero disables that check.
  static RegionSet generic(ScalarField signed_distance, double lipschitz_bound = 1.0,
                           double curvature_bound = 0.0);
  /// K = R^2 (a ball of infinite radius).
  static RegionSet everything();

  RegionKind kind() const noexcept { return kind_; }
  double signed_distance(Point x) const;
  bool contains(Point x) const { return signed_distance(x) < 0.0; }
  double lipschitz_bound() const noexcept { return lipschitz_; }
  double curvature_bound() const noexcept { return curvature_; }

  /// Throws InvalidArgument unless kind() matches.
  const Ball& as_ball() const;
  const HalfPlane& as_half_plane() const;

 private:
  RegionKind kind_ = RegionKind::Generic;
  Ball ball_{};
  HalfPlane half_plane_{};
  ScalarField sd_;
  double lipschitz_ = 1.0;
  double curvature_ = 0.0;
};

enum class ElementTag { Interior, Exterior, Interface };

struct ElementClassification {
  std::vector<ElementTag> tags;

  std::size_t count(ElementTag tag) const;
};

/// Interior: T ⊆ K. Exterior: T ∩ K = ∅. Everything else, including elements
/// that cannot be decided for generic regions, is Interface.
ElementClassification classify_elements(const SimplicialMesh& mesh, const RegionSet& region);

/// Exact area of (convex polygon) ∩ ball, summed from signed circle/triangle
/// intersections of the fan (center, p_k, p_{k+1}).
double ball_polygon_area(std::span<const Point> polygon, const Ball& ball);

/// Exact |polygon ∩ K| for balls and half-planes; generic regions go through
/// reference_region_integral with `tol`.
double region_polygon_area(std::span<const Point> polygon, const RegionSet& region,
                           double tol = 1e-12);

/// [a, b] ∩ K on the x-axis as {lo, hi} (lo >= hi when empty). Balls and
/// half-planes only.
std::pair<double, double> region_interval(double a, double b, const RegionSet& region);
/// Exact length of [a, b] ∩ K on the x-axis.
double region_interval_length(double a, double b, const RegionSet& region);

/// Convex polygon clipped to the half-plane dot(normal, x) < offset.
Polygon clip_half_plane(std::span<const Point> polygon, const HalfPlane& half_plane);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Unbiased Monte Carlo estimate of the integral of weight * 1_K over a convex
/// polygon, from `n_samples` uniform points. Deterministic in `seed`.
McEstimate mc_integrate_piece(std::span<const Point> polygon, const ScalarField& weight,
                              const RegionSet& region, std::uint64_t n_samples, std::uint64_t seed);

/// Same estimator over a union of disjoint convex polygons (a whole voxel):
/// samples are spread over the union in proportion to area.
McEstimate mc_integrate_union(std::span<const Polygon> polygons, const ScalarField& weight,
                              const RegionSet& region, std::uint64_t n_samples, std::uint64_t seed);

/// Adaptive reference integral of weight * 1_K over a convex polygon.
///
/// Triangles are refined (largest error estimate first) until the summed
/// two-level error estimate is below tol * (1 + |result|). Triangles the
/// boundary of K may cross are integrated over their part where the linear
/// interpolant of the signed distance is negative. Throws ConvergenceError
/// ("oracle did not converge") past refinement depth 40.
double reference_region_integral(std::span<const Point> polygon, const ScalarField& weight,
                                 const RegionSet& region, double tol);

/// Degree-4 symmetric triangle rule (6 points) applied to `f` on triangle abc.
double triangle_quadrature(const ScalarField& f, Point a, Point b, Point c);

/// Number of Monte Carlo samples floor(per_h2 / h^2), clamped to [1, cap].
std::uint64_t sample_budget(double h, double per_h2, std::uint64_t cap);

}  // namespace voxquad
