#include "voxquad/region.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "voxquad/error.hpp"
#include "voxquad/random.hpp"

namespace voxquad {

RegionSet RegionSet::ball(Point center, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("ball radius must be nonnegative");
  RegionSet r;
  r.kind_ = RegionKind::Ball;
  r.ball_ = Ball{center, radius};
  r.curvature_ = radius > 0.0 ? 1.0 / radius : 0.0;
  return r;
}

RegionSet RegionSet::half_plane(Point normal, double offset) {
  const double len = norm(normal);
  if (!(len > 0.0)) throw InvalidArgument("half-plane normal must be nonzero");
  RegionSet r;
  r.kind_ = RegionKind::HalfPlane;
  r.half_plane_ = HalfPlane{(1.0 / len) * normal, offset / len};
  return r;
}

RegionSet RegionSet::generic(ScalarField signed_distance, double lipschitz_bound,
                             double curvature_bound) {
  if (!signed_distance) throw InvalidArgument("generic region needs a signed distance");
  if (!(lipschitz_bound >= 1.0)) throw InvalidArgument("lipschitz bound must be >= 1");
  if (!(curvature_bound >= 0.0)) throw InvalidArgument("curvature bound must be nonnegative");
  RegionSet r;
  r.kind_ = RegionKind::Generic;
  r.sd_ = std::move(signed_distance);
  r.lipschitz_ = lipschitz_bound;
  r.curvature_ = curvature_bound;
  return r;
}

RegionSet RegionSet::everything() {
  return ball(Point{}, std::numeric_limits<double>::infinity());
}

double RegionSet::signed_distance(Point x) const {
  switch (kind_) {
    case RegionKind::Ball:
      return distance(x, ball_.center) - ball_.radius;
    case RegionKind::HalfPlane:
      return dot(half_plane_.normal, x) - half_plane_.offset;
    case RegionKind::Generic:
      break;
  }
  return sd_(x);
}

const Ball& RegionSet::as_ball() const {
  if (kind_ != RegionKind::Ball) throw InvalidArgument("region is not a ball");
  return ball_;
}

const HalfPlane& RegionSet::as_half_plane() const {
  if (kind_ != RegionKind::HalfPlane) throw InvalidArgument("region is not a half-plane");
  return half_plane_;
}

std::size_t ElementClassification::count(ElementTag tag) const {
  return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), tag));
}

namespace {

double point_segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * d);
}

double point_simplex_distance(Point p, std::span<const Point> v) {
  if (v.size() == 2) {
    const double lo = std::min(v[0].x, v[1].x);
    const double hi = std::max(v[0].x, v[1].x);
    const double dx = p.x < lo ? lo - p.x : (p.x > hi ? p.x - hi : 0.0);
    return std::hypot(dx, p.y);
  }
  const double s0 = signed_area(p, v[1], v[2]);
  const double s1 = signed_area(v[0], p, v[2]);
  const double s2 = signed_area(v[0], v[1], p);
  if (s0 >= 0.0 && s1 >= 0.0 && s2 >= 0.0) return 0.0;
  return std::min({point_segment_distance(p, v[0], v[1]), point_segment_distance(p, v[1], v[2]),
                   point_segment_distance(p, v[2], v[0])});
}

}  // namespace

ElementClassification classify_elements(const SimplicialMesh& mesh, const RegionSet& region) {
  ElementClassification result;
  result.tags.resize(mesh.num_elements(), ElementTag::Interface);
  std::array<Point, 3> v{};
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto idx = mesh.element(e);
    const std::size_t n = idx.size();
    double max_sd = -std::numeric_limits<double>::infinity();
    double min_sd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = mesh.node(idx[k]);
      const double s = region.signed_distance(v[k]);
      max_sd = std::max(max_sd, s);
      min_sd = std::min(min_sd, s);
    }
    const std::span<const Point> verts(v.data(), n);
    ElementTag tag = ElementTag::Interface;
    switch (region.kind()) {
      case RegionKind::Ball: {
        // Convexity: all vertices inside implies the simplex is inside.
        const Ball& b = region.as_ball();
        if (max_sd < 0.0) tag = ElementTag::Interior;
        else if (point_simplex_distance(b.center, verts) >= b.radius) tag = ElementTag::Exterior;
        break;
      }
      case RegionKind::HalfPlane:
        if (max_sd < 0.0) tag = ElementTag::Interior;
        else if (min_sd >= 0.0) tag = ElementTag::Exterior;
        break;
      case RegionKind::Generic: {
        double diam = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = a + 1; b < n; ++b) diam = std::max(diam, distance(v[a], v[b]));
        }
        const double margin = region.lipschitz_bound() * diam;
        if (max_sd < -margin) tag = ElementTag::Interior;
        else if (min_sd > margin) tag = ElementTag::Exterior;
        break;
      }
    }
    result.tags[e] = tag;
  }
  return result;
}

namespace {

// Signed area of disk(0, r) ∩ triangle(0, a, b).
double circle_triangle_signed_area(Point a, Point b, double r) {
  const Point d = b - a;
  const double qa = dot(d, d);
  if (qa == 0.0) return 0.0;
  const double qb = 2.0 * dot(a, d);
  const double qc = dot(a, a) - r * r;
  std::array<Point, 4> pts{};
  std::size_t n = 0;
  pts[n++] = a;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    // Numerically stable roots.
    const double q = -0.5 * (qb + std::copysign(sq, qb));
    double t0 = q / qa;
    double t1 = q != 0.0 ? qc / q : t0;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > 0.0 && t0 < 1.0) pts[n++] = a + t0 * d;
    if (t1 > 0.0 && t1 < 1.0) pts[n++] = a + t1 * d;
  }
  pts[n++] = b;
  const double r2 = r * r;
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Point p = pts[k];
    const Point q = pts[k + 1];
    const Point m = midpoint(p, q);
    if (dot(m, m) <= r2) {
      area += 0.5 * cross(p, q);
    } else {
      area += 0.5 * r2 * std::atan2(cross(p, q), dot(p, q));
    }
  }
  return area;
}

}  // namespace

double ball_polygon_area(std::span<const Point> polygon, const Ball& ball) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  const double full = signed_area(polygon);
  if (full == 0.0) return 0.0;
  bool all_inside = true;
  for (const Point& p : polygon) {
    if (!(distance(p, ball.center) <= ball.radius)) {
      all_inside = false;
      break;
    }
  }
  if (all_inside) return std::abs(full);
  if (!(ball.radius > 0.0)) return 0.0;
  // Disjoint: every edge stays outside the circle and the center is not enclosed.
  bool touches = false;
  double winding = 0.0;
  for (std::size_t k = 0; k < n && !touches; ++k) {
    const Point p = polygon[k] - ball.center, q = polygon[(k + 1) % n] - ball.center;
    const Point e = q - p;
    const double ee = dot(e, e);
    const double t = ee > 0.0 ? std::clamp(-dot(p, e) / ee, 0.0, 1.0) : 0.0;
    touches = norm(p + t * e) < ball.radius;
    winding += std::atan2(cross(p, q), dot(p, q));
  }
  if (!touches && std::abs(winding) < std::numbers::pi) return 0.0;
  double area = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    area += circle_triangle_signed_area(polygon[k] - ball.center,
                                        polygon[(k + 1) % n] - ball.center, ball.radius);
  }
  area = std::abs(area);
  return std::clamp(area, 0.0, std::abs(full));
}

Polygon clip_half_plane(std::span<const Point> polygon, const HalfPlane& hp) {
  Polygon out;
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point p = polygon[k];
    const Point q = polygon[(k + 1) % n];
    const double sp = dot(hp.normal, p) - hp.offset;
    const double sq = dot(hp.normal, q) - hp.offset;
    if (sp < 0.0) out.push_back(p);
    if ((sp < 0.0) != (sq < 0.0)) {
      const double t = sp / (sp - sq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

double region_polygon_area(std::span<const Point> polygon, const RegionSet& region, double tol) {
  switch (region.kind()) {
    case RegionKind::Ball:
      return ball_polygon_area(polygon, region.as_ball());
    case RegionKind::HalfPlane: {
      const Polygon clipped = clip_half_plane(polygon, region.as_half_plane());
      return clipped.size() < 3 ? 0.0 : polygon_area(clipped);
    }
    case RegionKind::Generic:
      break;
  }
  return reference_region_integral(polygon, [](Point) { return 1.0; }, region, tol);
}

std::pair<double, double> region_interval(double a, double b, const RegionSet& region) {
  if (a > b) std::swap(a, b);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  switch (region.kind()) {
    case RegionKind::Ball: {
      const Ball& ball = region.as_ball();
      const double dy = ball.center.y;
      if (std::abs(dy) >= ball.radius) return {a, a};
      const double half = std::isinf(ball.radius) ? ball.radius
                                                  : std::sqrt(ball.radius * ball.radius - dy * dy);
      lo = ball.center.x - half;
      hi = ball.center.x + half;
      break;
    }
    case RegionKind::HalfPlane: {
      const HalfPlane& hp = region.as_half_plane();
      if (hp.normal.x == 0.0) return hp.offset > 0.0 ? std::pair{a, b} : std::pair{a, a};
      const double cut = hp.offset / hp.normal.x;
      if (hp.normal.x > 0.0) hi = cut;
      else lo = cut;
      break;
    }
    case RegionKind::Generic:
      throw InvalidArgument("exact interval intersection needs a ball or half-plane region");
  }
  return {std::max(a, lo), std::min(b, hi)};
}

double region_interval_length(double a, double b, const RegionSet& region) {
  const auto [lo, hi] = region_interval(a, b, region);
  return std::max(0.0, hi - lo);
}

double triangle_quadrature(const ScalarField& f, Point a, Point b, Point c) {
  // Symmetric 6-point rule, exact for polynomials of degree 4.
  static constexpr double kA1 = 0.445948490915965;
  static constexpr double kW1 = 0.223381589678011;
  static constexpr double kA2 = 0.091576213509771;
  static constexpr double kW2 = 0.109951743655322;
  const double area = std::abs(signed_area(a, b, c));
  auto at = [&](double l0, double l1, double l2) { return f(l0 * a + l1 * b + l2 * c); };
  const double b1 = 1.0 - 2.0 * kA1;
  const double b2 = 1.0 - 2.0 * kA2;
  const double s1 = at(b1, kA1, kA1) + at(kA1, b1, kA1) + at(kA1, kA1, b1);
  const double s2 = at(b2, kA2, kA2) + at(kA2, b2, kA2) + at(kA2, kA2, b2);
  return area * (kW1 * s1 + kW2 * s2);
}

std::uint64_t sample_budget(double h, double per_h2, std::uint64_t cap) {
  if (!(h > 0.0) || !(per_h2 > 0.0)) throw InvalidArgument("sample budget needs h > 0 and per_h2 > 0");
  // The nudge keeps exact ratios such as 1000 / 0.1^2 from rounding down.
  const double n = std::floor(per_h2 / (h * h) * (1.0 + 1e-12));
  if (n >= static_cast<double>(cap)) return cap;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

McEstimate mc_integrate_union(std::span<const Polygon> polygons, const ScalarField& weight,
                              const RegionSet& region, std::uint64_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw InvalidArgument("Monte Carlo needs at least one sample");
  // Fan-triangulate every polygon; sample a triangle by area, then a point in it.
  struct Tri {
    Point a, b, c;
  };
  std::vector<Tri> tris;
  std::vector<double> cumulative;
  double area = 0.0;
  for (const Polygon& poly : polygons) {
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      const double a = std::abs(signed_area(poly[0], poly[k], poly[k + 1]));
      if (a <= 0.0) continue;
      tris.push_back({poly[0], poly[k], poly[k + 1]});
      area += a;
      cumulative.push_back(area);
    }
  }
  if (tris.empty() || area <= 0.0) return {};

  Rng rng(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    std::size_t t = 0;
    if (tris.size() > 1) {
      const double pick = rng.uniform() * area;
      t = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
                                   cumulative.begin());
      t = std::min(t, tris.size() - 1);
    }
    double u = rng.uniform();
    double v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Tri& tri = tris[t];
    const Point x = tri.a + u * (tri.b - tri.a) + v * (tri.c - tri.a);
    const double f = region.contains(x) ? weight(x) : 0.0;
    // Welford update.
    const double delta = f - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (f - mean);
  }
  McEstimate result;
  result.estimate = area * mean;
  if (n_samples > 1) {
    const double variance = m2 / static_cast<double>(n_samples - 1);
    result.std_error = area * std::sqrt(variance / static_cast<double>(n_samples));
  } else {
    result.std_error = std::numeric_limits<double>::infinity();
  }
  return result;
}

McEstimate mc_integrate_piece(std::span<const Point> polygon, const ScalarField& weight,
                              const RegionSet& region, std::uint64_t n_samples, std::uint64_t seed) {
  const Polygon poly(polygon.begin(), polygon.end());
  return mc_integrate_union(std::span<const Polygon>(&poly, 1), weight, region, n_samples, seed);
}

namespace {

struct OracleCell {
  Point a, b, c;
  int depth = 0;
  double value = 0.0;        // single-level estimate
  double refined = 0.0;      // sum of the four children's estimates
  double error = 0.0;        // |value - refined|
  std::array<double, 4> child_values{};
};

class RegionIntegrator {
 public:
  RegionIntegrator(const ScalarField& weight, const RegionSet& region)
      : weight_(weight), region_(region) {}

  double estimate(Point a, Point b, Point c) const {
    const Point g = (1.0 / 3.0) * (a + b + c);
    const double reach = std::max({distance(g, a), distance(g, b), distance(g, c)});
    const double margin = region_.lipschitz_bound() * reach;
    const double sg = region_.signed_distance(g);
    if (sg >= margin) return 0.0;
    if (sg < -margin) return triangle_quadrature(weight_, a, b, c);
    // Possibly cut: integrate over the zero sublevel set of the linear
    // interpolant of the signed distance.
    const std::array<Point, 3> v{a, b, c};
    const std::array<double, 3> s{region_.signed_distance(a), region_.signed_distance(b),
                                  region_.signed_distance(c)};
    std::array<Point, 4> clipped{};
    std::size_t n = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t next = (k + 1) % 3;
      if (s[k] < 0.0) clipped[n++] = v[k];
      if ((s[k] < 0.0) != (s[next] < 0.0)) {
        const double t = s[k] / (s[k] - s[next]);
        clipped[n++] = v[k] + t * (v[next] - v[k]);
      }
    }
    double sum = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      sum += triangle_quadrature(weight_, clipped[0], clipped[k], clipped[k + 1]);
    }
    return sum;
  }

  OracleCell make_cell(Point a, Point b, Point c, int depth, double value) const {
    OracleCell cell{a, b, c, depth, value};
    const auto kids = children(cell);
    for (std::size_t k = 0; k < 4; ++k) {
      cell.child_values[k] = estimate(kids[k][0], kids[k][1], kids[k][2]);
      cell.refined += cell.child_values[k];
    }
    cell.error = std::abs(cell.value - cell.refined);
    bool hidden = may_hide_crossing(a, b, c);
    for (std::size_t k = 0; k < 4 && !hidden; ++k) hidden = may_hide_crossing(kids[k][0], kids[k][1], kids[k][2]);
    if (hidden) {
      const Point g = (1.0 / 3.0) * (a + b + c);
      const double w = std::max({std::abs(weight_(a)), std::abs(weight_(b)), std::abs(weight_(c)),
                                 std::abs(weight_(g))});
      cell.error = std::max(cell.error, w * std::abs(signed_area(a, b, c)));
    }
    return cell;
  }

  // True when the interface may cross the cell although all vertices lie on
  // one side: the cell is coarse against the curvature radius, or the vertex
  // distances are within the deviation of sd from its linear interpolant.
  bool may_hide_crossing(Point a, Point b, Point c) const {
    const double kappa = region_.curvature_bound();
    if (!(kappa > 0.0)) return false;
    const Point g = (1.0 / 3.0) * (a + b + c);
    const double reach = std::max({distance(g, a), distance(g, b), distance(g, c)});
    if (std::abs(region_.signed_distance(g)) >= region_.lipschitz_bound() * reach) return false;
    const double sa = region_.signed_distance(a);
    const double sb = region_.signed_distance(b);
    const double sc = region_.signed_distance(c);
    if ((sa < 0.0) != (sb < 0.0) || (sa < 0.0) != (sc < 0.0)) return false;
    if (kappa * reach > 0.25) return true;
    return std::min({std::abs(sa), std::abs(sb), std::abs(sc)}) < 2.0 * kappa * reach * reach;
  }

  static std::array<std::array<Point, 3>, 4> children(const OracleCell& cell) {
    const Point ab = midpoint(cell.a, cell.b);
    const Point bc = midpoint(cell.b, cell.c);
    const Point ca = midpoint(cell.c, cell.a);
    return {{{cell.a, ab, ca}, {ab, cell.b, bc}, {ca, bc, cell.c}, {ab, bc, ca}}};
  }

 private:
  const ScalarField& weight_;
  const RegionSet& region_;
};

}  // namespace

double reference_region_integral(std::span<const Point> polygon, const ScalarField& weight,
                                 const RegionSet& region, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("oracle tolerance must be positive");
  constexpr int kMaxDepth = 40;
  constexpr std::size_t kMaxCells = 4'000'000;
  if (polygon.size() < 3 || polygon_area(polygon) == 0.0) return 0.0;

  RegionIntegrator integrator(weight, region);
  auto by_error = [](const OracleCell& x, const OracleCell& y) { return x.error < y.error; };
  std::priority_queue<OracleCell, std::vector<OracleCell>, decltype(by_error)> heap(by_error);

  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
    const Point a = polygon[0], b = polygon[k], c = polygon[k + 1];
    if (signed_area(a, b, c) == 0.0) continue;
    OracleCell cell = integrator.make_cell(a, b, c, 0, integrator.estimate(a, b, c));
    total += cell.refined;
    total_error += cell.error;
    heap.push(cell);
  }

  std::size_t cells = heap.size();
  while (!heap.empty() && total_error > tol * (1.0 + std::abs(total))) {
    const OracleCell cell = heap.top();
    heap.pop();
    if (cell.depth >= kMaxDepth || cells > kMaxCells) {
      throw ConvergenceError("oracle did not converge", total_error);
    }
    total -= cell.refined;
    total_error -= cell.error;
    const auto kids = RegionIntegrator::children(cell);
    for (std::size_t k = 0; k < 4; ++k) {
      OracleCell child = integrator.make_cell(kids[k][0], kids[k][1], kids[k][2], cell.depth + 1,
                                              cell.child_values[k]);
      total += child.refined;
      total_error += child.error;
      heap.push(child);
    }
    cells += 3;
  }
  return total;
}

}  // namespace voxquad
