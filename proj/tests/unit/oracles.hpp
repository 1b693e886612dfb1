// Reference computations for the unit tests. Nothing here calls into the
// library's own geometry or assembly code.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "voxquad/mesh.hpp"
#include "voxquad/sparse.hpp"

namespace oracle {

using voxquad::Point;

inline Eigen::MatrixXd dense(const voxquad::SparseOperator& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()),
                                            static_cast<Eigen::Index>(a.cols()));
  for (const auto& t : a.triplets()) {
    m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
  }
  return m;
}

// Length of {x : (x, y) in convex polygon and |(x, y) - c| < r} on one scanline.
inline double chord(const std::vector<Point>& poly, Point c, double r, double y) {
  double lo = INFINITY, hi = -INFINITY;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = poly[k], b = poly[(k + 1) % n];
    if ((a.y - y) * (b.y - y) > 0.0 || a.y == b.y) continue;
    const double x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double dy = y - c.y;
  if (!(lo < hi) || std::abs(dy) >= r) return 0.0;
  const double half = std::sqrt(r * r - dy * dy);
  return std::max(0.0, std::min(hi, c.x + half) - std::max(lo, c.x - half));
}

// Area of convex polygon ∩ disk by Gauss-Legendre scanlines between the
// y-breakpoints (polygon vertices and the disk's top and bottom).
inline double scanline_area(const std::vector<Point>& poly, Point c, double r, int slices = 4000) {
  std::vector<double> ys;
  for (const Point& p : poly) ys.push_back(p.y);
  ys.push_back(c.y - r);
  ys.push_back(c.y + r);
  std::sort(ys.begin(), ys.end());
  const double g = 0.5 / std::sqrt(3.0);
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    const double dy = (ys[k + 1] - ys[k]) / slices;
    if (dy <= 0.0) continue;
    for (int s = 0; s < slices; ++s) {
      const double mid = ys[k] + (s + 0.5) * dy;
      area += 0.5 * dy * (chord(poly, c, r, mid - g * dy) + chord(poly, c, r, mid + g * dy));
    }
  }
  return area;
}

// P1 basis gradients from the inverse of the affine map of a triangle.
inline std::vector<Point> triangle_gradients(Point a, Point b, Point c) {
  Eigen::Matrix2d j;
  j << b.x - a.x, c.x - a.x, b.y - a.y, c.y - a.y;
  const Eigen::Matrix2d jit = j.inverse().transpose();
  const Eigen::Vector2d g1 = jit * Eigen::Vector2d(1.0, 0.0);
  const Eigen::Vector2d g2 = jit * Eigen::Vector2d(0.0, 1.0);
  return {{-g1.x() - g2.x(), -g1.y() - g2.y()}, {g1.x(), g1.y()}, {g2.x(), g2.y()}};
}

inline double triangle_area(Point a, Point b, Point c) {
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

// Dense P1 stiffness assembled element by element.
inline Eigen::MatrixXd stiffness(const voxquad::SimplicialMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto idx = mesh.element(e);
    if (mesh.dim() == 1) {
      const double h = std::abs(mesh.node(idx[1]).x - mesh.node(idx[0]).x);
      const auto i = static_cast<Eigen::Index>(idx[0]), j = static_cast<Eigen::Index>(idx[1]);
      s(i, i) += 1.0 / h;
      s(j, j) += 1.0 / h;
      s(i, j) -= 1.0 / h;
      s(j, i) -= 1.0 / h;
      continue;
    }
    const Point a = mesh.node(idx[0]), b = mesh.node(idx[1]), c = mesh.node(idx[2]);
    const auto g = triangle_gradients(a, b, c);
    const double area = triangle_area(a, b, c);
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        s(static_cast<Eigen::Index>(idx[p]), static_cast<Eigen::Index>(idx[q])) +=
            area * (g[p].x * g[q].x + g[p].y * g[q].y);
      }
    }
  }
  return s;
}

// Ordinary least squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
