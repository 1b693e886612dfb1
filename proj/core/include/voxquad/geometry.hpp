#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace voxquad {

/// A point in the plane. One-dimensional meshes use `x` only and keep `y == 0`.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

using Polygon = std::vector<Point>;

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
constexpr Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

/// Signed area of a triangle, positive when counter-clockwise.
constexpr double signed_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

/// Shoelace formula; positive for counter-clockwise vertex order.
/// Fan from the first vertex, which avoids cancellation for small polygons
/// far from the origin.
inline double signed_area(std::span<const Point> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    twice += cross(polygon[k] - polygon[0], polygon[k + 1] - polygon[0]);
  }
  return 0.5 * twice;
}

/// Barycentric coordinates of x with respect to triangle abc.
constexpr std::array<double, 3> barycentric(Point a, Point b, Point c, Point x) {
  const double twice = cross(b - a, c - a);
  const double la = cross(c - b, x - b) / twice;
  const double lb = cross(a - c, x - c) / twice;
  return {la, lb, 1.0 - la - lb};
}

inline double polygon_area(std::span<const Point> polygon) {
  return std::abs(signed_area(polygon));
}

inline Point vertex_centroid(std::span<const Point> polygon) {
  Point c{};
  for (const Point& p : polygon) c = c + p;
  return (1.0 / static_cast<double>(polygon.size())) * c;
}

}  // namespace voxquad
