#include "voxquad/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>

#include "voxquad/error.hpp"

namespace voxquad {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

std::pair<Index, Index> edge_from_key(std::uint64_t key) {
  return {static_cast<Index>(key >> 32), static_cast<Index>(key & 0xffffffffu)};
}

double triangle_angle(Point apex, Point p, Point q) {
  const Point u = p - apex;
  const Point v = q - apex;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

}  // namespace

SimplicialMesh::SimplicialMesh(int dim, std::vector<Point> nodes, std::vector<Index> connectivity,
                               std::vector<Index> boundary_nodes)
    : dim_(dim), nodes_(std::move(nodes)), connectivity_(std::move(connectivity)) {
  if (dim_ != 1 && dim_ != 2) {
    throw InvalidArgument("mesh dimension must be 1 or 2, got " + std::to_string(dim_));
  }
  const auto stride = static_cast<std::size_t>(dim_ + 1);
  if (connectivity_.size() % stride != 0) {
    throw InvalidArgument("connectivity length is not a multiple of dim + 1");
  }
  for (const Point& p : nodes_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidArgument("non-finite node coordinate");
    }
  }
  const std::size_t n_elem = connectivity_.size() / stride;
  for (std::size_t e = 0; e < n_elem; ++e) {
    Index* v = connectivity_.data() + e * stride;
    for (std::size_t a = 0; a < stride; ++a) {
      if (v[a] >= nodes_.size()) {
        throw InvalidArgument("element " + std::to_string(e) + ": node index out of range");
      }
      for (std::size_t b = 0; b < a; ++b) {
        if (v[a] == v[b]) {
          throw InvalidArgument("element " + std::to_string(e) + ": repeated vertex");
        }
      }
    }
    if (dim_ == 2) {
      const double area = signed_area(nodes_[v[0]], nodes_[v[1]], nodes_[v[2]]);
      if (area == 0.0) {
        throw InvalidArgument("element " + std::to_string(e) + ": degenerate element");
      }
      if (area < 0.0) std::swap(v[1], v[2]);
    } else if (nodes_[v[0]].x == nodes_[v[1]].x) {
      throw InvalidArgument("element " + std::to_string(e) + ": degenerate element");
    }
  }

  // Boundary facets are those owned by a single element.
  if (dim_ == 2) {
    std::unordered_map<std::uint64_t, int> count;
    for (std::size_t e = 0; e < n_elem; ++e) {
      const Index* v = connectivity_.data() + e * 3;
      for (int k = 0; k < 3; ++k) ++count[edge_key(v[k], v[(k + 1) % 3])];
    }
    for (std::size_t e = 0; e < n_elem; ++e) {
      const Index* v = connectivity_.data() + e * 3;
      for (int k = 0; k < 3; ++k) {
        if (count[edge_key(v[k], v[(k + 1) % 3])] == 1) {
          boundary_edges_.emplace_back(v[k], v[(k + 1) % 3]);
        }
      }
    }
  }
  if (boundary_nodes.empty()) {
    if (dim_ == 2) {
      for (const auto& [a, b] : boundary_edges_) {
        boundary_nodes.push_back(a);
        boundary_nodes.push_back(b);
      }
    } else {
      std::vector<int> count(nodes_.size(), 0);
      for (Index v : connectivity_) ++count[v];
      for (Index i = 0; i < nodes_.size(); ++i) {
        if (count[i] == 1) boundary_nodes.push_back(i);
      }
    }
  }
  for (Index b : boundary_nodes) {
    if (b >= nodes_.size()) throw InvalidArgument("boundary node index out of range");
  }
  std::sort(boundary_nodes.begin(), boundary_nodes.end());
  boundary_nodes.erase(std::unique(boundary_nodes.begin(), boundary_nodes.end()),
                       boundary_nodes.end());
  boundary_nodes_ = std::move(boundary_nodes);
}

bool SimplicialMesh::is_boundary_node(Index i) const {
  return std::binary_search(boundary_nodes_.begin(), boundary_nodes_.end(), i);
}

double SimplicialMesh::total_measure() const {
  double total = 0.0;
  for (Index e = 0; e < num_elements(); ++e) {
    const auto v = element(e);
    total += dim_ == 1 ? std::abs(nodes_[v[1]].x - nodes_[v[0]].x)
                       : signed_area(nodes_[v[0]], nodes_[v[1]], nodes_[v[2]]);
  }
  return total;
}

ElementGeometry element_geometry(const SimplicialMesh& mesh, Index element) {
  if (element >= mesh.num_elements()) {
    throw InvalidArgument("element index out of range");
  }
  const auto v = mesh.element(element);
  ElementGeometry g;
  if (mesh.dim() == 1) {
    const double x0 = mesh.node(v[0]).x;
    const double x1 = mesh.node(v[1]).x;
    const double len = x1 - x0;
    if (len == 0.0) throw InvalidArgument("degenerate element");
    g.measure = std::abs(len);
    g.gradients = {Point{-1.0 / len, 0.0}, Point{1.0 / len, 0.0}};
    g.diameter = g.measure;
    g.inradius = 0.5 * g.measure;
    return g;
  }
  const Point a = mesh.node(v[0]);
  const Point b = mesh.node(v[1]);
  const Point c = mesh.node(v[2]);
  const double twice_area = cross(b - a, c - a);
  if (twice_area <= 0.0) throw InvalidArgument("degenerate element");
  g.measure = 0.5 * twice_area;
  // grad(phi_k) is the inward normal of the opposite edge scaled by 1/(2|T|).
  const Point opposite[3] = {c - b, a - c, b - a};
  g.gradients.reserve(3);
  for (const Point& e : opposite) {
    g.gradients.push_back(Point{-e.y / twice_area, e.x / twice_area});
  }
  const double la = distance(b, c);
  const double lb = distance(c, a);
  const double lc = distance(a, b);
  g.diameter = std::max({la, lb, lc});
  g.inradius = twice_area / (la + lb + lc);
  return g;
}

double mesh_size(const SimplicialMesh& mesh) {
  if (mesh.num_elements() == 0) throw InvalidArgument("empty mesh");
  double h = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    h = std::max(h, element_geometry(mesh, e).diameter);
  }
  return h;
}

double nondegeneracy_ratio(const SimplicialMesh& mesh) {
  if (mesh.num_elements() == 0) throw InvalidArgument("empty mesh");
  double ratio = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto g = element_geometry(mesh, e);
    ratio = std::max(ratio, g.diameter / g.inradius);
  }
  return ratio;
}

MeshTopologyReport check_topology(const SimplicialMesh& mesh) {
  MeshTopologyReport report;
  report.min_signed_measure = std::numeric_limits<double>::infinity();
  std::unordered_map<std::uint64_t, int> count;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto v = mesh.element(e);
    if (mesh.dim() == 2) {
      report.min_signed_measure = std::min(
          report.min_signed_measure, signed_area(mesh.node(v[0]), mesh.node(v[1]), mesh.node(v[2])));
      for (int k = 0; k < 3; ++k) ++count[edge_key(v[k], v[(k + 1) % 3])];
    } else {
      report.min_signed_measure =
          std::min(report.min_signed_measure, std::abs(mesh.node(v[1]).x - mesh.node(v[0]).x));
      ++count[v[0]];
      ++count[v[1]];
    }
  }
  for (const auto& [key, c] : count) {
    if (c == 1) ++report.boundary_edges;
    else if (c == 2) ++report.interior_edges;
    else ++report.overloaded_edges;
  }
  return report;
}

SimplicialMesh generate_interval_mesh(std::size_t n, double a, double b,
                                      std::span<const double> pinned) {
  if (n == 0) throw InvalidArgument("interval mesh needs a positive element count");
  if (!(a < b)) throw InvalidArgument("interval mesh needs a < b");
  std::vector<double> breaks{a};
  std::vector<double> pins(pinned.begin(), pinned.end());
  std::sort(pins.begin(), pins.end());
  pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
  for (double p : pins) {
    if (!(p > a && p < b)) throw InvalidArgument("pinned value outside (a, b)");
    breaks.push_back(p);
  }
  breaks.push_back(b);
  const std::size_t segments = breaks.size() - 1;
  if (n < segments) throw InvalidArgument("too few elements for the pinned nodes");

  // Element counts per segment, proportional to length, then balanced so the
  // element-length ratio stays small.
  std::vector<std::size_t> counts(segments);
  std::vector<double> lengths(segments);
  std::size_t total = 0;
  for (std::size_t s = 0; s < segments; ++s) {
    lengths[s] = breaks[s + 1] - breaks[s];
    counts[s] = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * lengths[s] / (b - a))));
    total += counts[s];
  }
  while (total > n) {
    std::size_t best = segments;
    for (std::size_t s = 0; s < segments; ++s) {
      if (counts[s] > 1 && (best == segments || lengths[s] / static_cast<double>(counts[s] - 1) <
                                                    lengths[best] / static_cast<double>(counts[best] - 1))) {
        best = s;
      }
    }
    --counts[best];
    --total;
  }
  while (total < n) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < segments; ++s) {
      if (lengths[s] / static_cast<double>(counts[s]) >
          lengths[best] / static_cast<double>(counts[best])) {
        best = s;
      }
    }
    ++counts[best];
    ++total;
  }

  std::vector<Point> nodes;
  nodes.reserve(n + 1);
  for (std::size_t s = 0; s < segments; ++s) {
    for (std::size_t k = 0; k < counts[s]; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(counts[s]);
      nodes.push_back(Point{k == 0 ? breaks[s] : breaks[s] + t * lengths[s], 0.0});
    }
  }
  nodes.push_back(Point{b, 0.0});
  std::vector<Index> conn;
  conn.reserve(2 * n);
  for (Index e = 0; e < n; ++e) {
    conn.push_back(e);
    conn.push_back(e + 1);
  }
  return SimplicialMesh(1, std::move(nodes), std::move(conn), {0, n});
}

namespace {

// Lawson edge flips until every interior edge satisfies the empty-circle
// (opposite angles sum <= pi) condition.
void make_delaunay(const std::vector<Point>& nodes, std::vector<std::array<Index, 3>>& tris) {
  constexpr int kMaxPasses = 200;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::unordered_map<std::uint64_t, std::array<std::size_t, 2>> owners;
    owners.reserve(tris.size() * 2);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      for (int k = 0; k < 3; ++k) {
        auto [it, inserted] = owners.try_emplace(edge_key(tris[t][k], tris[t][(k + 1) % 3]),
                                                 std::array<std::size_t, 2>{t, tris.size()});
        if (!inserted) it->second[1] = t;
      }
    }
    std::vector<bool> touched(tris.size(), false);
    bool flipped = false;
    for (const auto& [key, owner] : owners) {
      const auto [t1, t2] = owner;
      if (t2 == tris.size() || touched[t1] || touched[t2]) continue;
      const auto [p, q] = edge_from_key(key);
      auto opposite = [&](std::size_t t) {
        for (Index v : tris[t]) {
          if (v != p && v != q) return v;
        }
        return tris[t][0];
      };
      const Index a = opposite(t1);
      const Index b = opposite(t2);
      const double sum = triangle_angle(nodes[a], nodes[p], nodes[q]) +
                         triangle_angle(nodes[b], nodes[p], nodes[q]);
      if (sum > std::numbers::pi + 1e-12) {
        tris[t1] = {a, b, p};
        tris[t2] = {a, b, q};
        touched[t1] = touched[t2] = true;
        flipped = true;
      }
    }
    if (!flipped) return;
  }
}

}  // namespace

SimplicialMesh generate_disk_mesh(std::size_t rings) {
  if (rings == 0) throw InvalidArgument("disk mesh needs at least one ring");
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Point> nodes{{0.0, 0.0}};
  auto ring_offset = [](std::size_t k) -> Index { return k == 0 ? 0 : 1 + 3 * k * (k - 1); };
  auto ring_size = [](std::size_t k) -> std::size_t { return k == 0 ? 1 : 6 * k; };
  for (std::size_t k = 1; k <= rings; ++k) {
    const double radius = k == rings ? 1.0 : static_cast<double>(k) / static_cast<double>(rings);
    const std::size_t m = ring_size(k);
    for (std::size_t j = 0; j < m; ++j) {
      const double theta = two_pi * static_cast<double>(j) / static_cast<double>(m);
      nodes.push_back(Point{radius * std::cos(theta), radius * std::sin(theta)});
    }
  }

  std::vector<std::array<Index, 3>> tris;
  tris.reserve(6 * rings * rings);
  for (std::size_t k = 1; k <= rings; ++k) {
    const std::size_t n0 = ring_size(k - 1);
    const std::size_t n1 = ring_size(k);
    const Index o0 = ring_offset(k - 1);
    const Index o1 = ring_offset(k);
    if (k == 1) {
      for (std::size_t j = 0; j < n1; ++j) {
        tris.push_back({0, o1 + j, o1 + (j + 1) % n1});
      }
      continue;
    }
    // Merge the two rings by angle; both start at angle zero.
    std::size_t i0 = 0;
    std::size_t i1 = 0;
    while (i0 < n0 || i1 < n1) {
      const bool advance_outer = i1 < n1 && (i0 == n0 || (i1 + 1) * n0 <= (i0 + 1) * n1);
      if (advance_outer) {
        tris.push_back({o0 + i0 % n0, o1 + i1, o1 + (i1 + 1) % n1});
        ++i1;
      } else {
        tris.push_back({o0 + i0, o1 + i1 % n1, o0 + (i0 + 1) % n0});
        ++i0;
      }
    }
  }
  make_delaunay(nodes, tris);

  std::vector<Index> conn;
  conn.reserve(3 * tris.size());
  for (const auto& t : tris) conn.insert(conn.end(), t.begin(), t.end());
  std::vector<Index> boundary(ring_size(rings));
  std::iota(boundary.begin(), boundary.end(), ring_offset(rings));
  return SimplicialMesh(2, std::move(nodes), std::move(conn), std::move(boundary));
}

TensorMesh::TensorMesh(std::vector<SimplicialMesh> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("tensor product needs at least one component");
  for (const auto& c : components_) {
    if (c.num_elements() == 0) throw InvalidArgument("tensor product component has no elements");
    dim_ += c.dim();
    num_nodes_ *= c.num_nodes();
    num_elements_ *= c.num_elements();
    nodes_per_element_ *= static_cast<std::size_t>(c.dim() + 1);
  }
}

std::vector<Index> TensorMesh::node_multi_index(Index node) const {
  std::vector<Index> multi(components_.size());
  for (std::size_t j = components_.size(); j-- > 0;) {
    multi[j] = node % components_[j].num_nodes();
    node /= components_[j].num_nodes();
  }
  return multi;
}

Index TensorMesh::node_index(std::span<const Index> multi) const {
  Index idx = 0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    idx = idx * components_[j].num_nodes() + multi[j];
  }
  return idx;
}

std::vector<Index> TensorMesh::element_multi_index(Index element) const {
  std::vector<Index> multi(components_.size());
  for (std::size_t j = components_.size(); j-- > 0;) {
    multi[j] = element % components_[j].num_elements();
    element /= components_[j].num_elements();
  }
  return multi;
}

Index TensorMesh::element_index(std::span<const Index> multi) const {
  Index idx = 0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    idx = idx * components_[j].num_elements() + multi[j];
  }
  return idx;
}

std::vector<Index> TensorMesh::element_nodes(Index element) const {
  const auto emulti = element_multi_index(element);
  std::vector<Index> result;
  result.reserve(nodes_per_element_);
  std::vector<Index> local(components_.size(), 0);
  std::vector<Index> multi(components_.size());
  for (std::size_t count = 0; count < nodes_per_element_; ++count) {
    for (std::size_t j = 0; j < components_.size(); ++j) {
      multi[j] = components_[j].element(emulti[j])[local[j]];
    }
    result.push_back(node_index(multi));
    for (std::size_t j = components_.size(); j-- > 0;) {
      if (++local[j] < static_cast<Index>(components_[j].nodes_per_element())) break;
      local[j] = 0;
    }
  }
  return result;
}

double TensorMesh::element_measure(Index element) const {
  const auto emulti = element_multi_index(element);
  double m = 1.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    m *= element_geometry(components_[j], emulti[j]).measure;
  }
  return m;
}

std::vector<double> TensorMesh::node_coordinates(Index node) const {
  const auto multi = node_multi_index(node);
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(dim_));
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const Point& p = components_[j].node(multi[j]);
    coords.push_back(p.x);
    if (components_[j].dim() == 2) coords.push_back(p.y);
  }
  return coords;
}

TensorMesh tensor_product_mesh(std::vector<SimplicialMesh> components) {
  return TensorMesh(std::move(components));
}

}  // namespace voxquad
