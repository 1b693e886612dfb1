#include "voxquad/dual_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxquad/error.hpp"

namespace voxquad {

namespace {

void build_csr(std::size_t rows, const std::vector<VoxelPiece>& pieces, bool by_node,
               std::vector<std::size_t>& offsets, std::vector<std::size_t>& entries) {
  offsets.assign(rows + 1, 0);
  for (const auto& p : pieces) ++offsets[(by_node ? p.node : p.element) + 1];
  for (std::size_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
  entries.resize(pieces.size());
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    entries[fill[by_node ? pieces[k].node : pieces[k].element]++] = k;
  }
}

}  // namespace

DualMesh::DualMesh(int dim, std::size_t num_nodes, std::size_t num_elements,
                   std::size_t nodes_per_element, std::vector<VoxelPiece> pieces)
    : dim_(dim),
      num_elements_(num_elements),
      nodes_per_element_(nodes_per_element),
      pieces_(std::move(pieces)),
      voxel_measure_(num_nodes, 0.0) {
  for (const auto& p : pieces_) {
    if (p.node >= num_nodes || p.element >= num_elements) {
      throw InvalidArgument("voxel piece refers to an out-of-range node or element");
    }
    voxel_measure_[p.node] += p.measure;
  }
  build_csr(num_nodes, pieces_, true, node_offsets_, node_pieces_);
  build_csr(num_elements, pieces_, false, element_offsets_, element_pieces_);
}

std::span<const std::size_t> DualMesh::pieces_of_node(Index node) const {
  return std::span<const std::size_t>(node_pieces_)
      .subspan(node_offsets_[node], node_offsets_[node + 1] - node_offsets_[node]);
}

std::span<const std::size_t> DualMesh::pieces_of_element(Index element) const {
  return std::span<const std::size_t>(element_pieces_)
      .subspan(element_offsets_[element], element_offsets_[element + 1] - element_offsets_[element]);
}

double DualMesh::total_measure() const {
  double total = 0.0;
  for (double m : voxel_measure_) total += m;
  return total;
}

double piece_measure(int dim, std::span<const Point> polygon) {
  if (dim == 1) return polygon.size() == 2 ? std::abs(polygon[1].x - polygon[0].x) : 0.0;
  return polygon_area(polygon);
}

DualMesh barycentric_dual(const SimplicialMesh& mesh) {
  std::vector<VoxelPiece> pieces;
  const auto npe = static_cast<std::size_t>(mesh.nodes_per_element());
  pieces.reserve(mesh.num_elements() * npe);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto v = mesh.element(e);
    const double measure = element_geometry(mesh, e).measure;
    if (mesh.dim() == 1) {
      const Point a = mesh.node(v[0]);
      const Point b = mesh.node(v[1]);
      const Point m = midpoint(a, b);
      pieces.push_back({v[0], e, {a, m}, 0.5 * measure});
      pieces.push_back({v[1], e, {m, b}, 0.5 * measure});
      continue;
    }
    const Point p[3] = {mesh.node(v[0]), mesh.node(v[1]), mesh.node(v[2])};
    const Point centroid = (1.0 / 3.0) * (p[0] + p[1] + p[2]);
    for (int k = 0; k < 3; ++k) {
      const Point& x = p[k];
      const Point& next = p[(k + 1) % 3];
      const Point& prev = p[(k + 2) % 3];
      pieces.push_back({v[k], e, {x, midpoint(x, next), centroid, midpoint(prev, x)}, measure / 3.0});
    }
  }
  return DualMesh(mesh.dim(), mesh.num_nodes(), mesh.num_elements(), npe, std::move(pieces));
}

DualMesh tensor_dual(const TensorMesh& tmesh, std::span<const DualMesh> component_duals) {
  const std::size_t J = tmesh.num_components();
  if (component_duals.size() != J) {
    throw InvalidArgument("tensor_dual: expected " + std::to_string(J) + " component duals, got " +
                          std::to_string(component_duals.size()));
  }
  for (std::size_t j = 0; j < J; ++j) {
    if (component_duals[j].num_nodes() != tmesh.component(j).num_nodes() ||
        component_duals[j].num_elements() != tmesh.component(j).num_elements()) {
      throw InvalidArgument("tensor_dual: component dual does not match its mesh");
    }
  }
  if (J == 1) return component_duals[0];

  // Geometry is kept only for the planar product of two intervals.
  const bool planar = J == 2 && tmesh.component(0).dim() == 1 && tmesh.component(1).dim() == 1;

  std::vector<VoxelPiece> pieces;
  pieces.reserve(tmesh.num_elements() * tmesh.nodes_per_element());
  std::vector<Index> node_multi(J);
  for (Index e = 0; e < tmesh.num_elements(); ++e) {
    const auto emulti = tmesh.element_multi_index(e);
    std::vector<std::span<const std::size_t>> local(J);
    for (std::size_t j = 0; j < J; ++j) local[j] = component_duals[j].pieces_of_element(emulti[j]);
    std::vector<std::size_t> cursor(J, 0);
    for (std::size_t count = 0; count < tmesh.nodes_per_element(); ++count) {
      double measure = 1.0;
      for (std::size_t j = 0; j < J; ++j) {
        const VoxelPiece& cp = component_duals[j].piece(local[j][cursor[j]]);
        node_multi[j] = cp.node;
        measure *= cp.measure;
      }
      VoxelPiece piece{tmesh.node_index(node_multi), e, {}, measure};
      if (planar) {
        const auto& px = component_duals[0].piece(local[0][cursor[0]]).polygon;
        const auto& py = component_duals[1].piece(local[1][cursor[1]]).polygon;
        const double x0 = std::min(px[0].x, px[1].x), x1 = std::max(px[0].x, px[1].x);
        const double y0 = std::min(py[0].x, py[1].x), y1 = std::max(py[0].x, py[1].x);
        piece.polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
      }
      pieces.push_back(std::move(piece));
      for (std::size_t j = J; j-- > 0;) {
        if (++cursor[j] < local[j].size()) break;
        cursor[j] = 0;
      }
    }
  }
  return DualMesh(tmesh.dim(), tmesh.num_nodes(), tmesh.num_elements(), tmesh.nodes_per_element(),
                  std::move(pieces));
}

double DualIdentityReport::max_deviation() const {
  return std::max({piece_deviation, total_deviation, voxel_sum_deviation,
                   incidence_errors ? 1.0 : 0.0});
}

namespace {

template <typename MeasureFn, typename NodesFn>
DualIdentityReport verify_impl(const DualMesh& dual, std::size_t num_elements, int geometry_dim,
                               MeasureFn element_measure, NodesFn element_nodes) {
  DualIdentityReport report;
  double domain = 0.0;
  for (Index e = 0; e < num_elements; ++e) {
    const double measure = element_measure(e);
    domain += measure;
    auto nodes = element_nodes(e);
    std::sort(nodes.begin(), nodes.end());
    const auto pieces = dual.pieces_of_element(e);
    std::vector<Index> seen;
    for (std::size_t k : pieces) {
      const VoxelPiece& p = dual.piece(k);
      seen.push_back(p.node);
      const double m = p.polygon.empty() ? p.measure : piece_measure(geometry_dim, p.polygon);
      const double dev =
          std::abs(m * static_cast<double>(dual.nodes_per_element()) / measure - 1.0);
      report.piece_deviation = std::max(report.piece_deviation, dev);
    }
    std::sort(seen.begin(), seen.end());
    if (seen != nodes) ++report.incidence_errors;
  }
  std::vector<double> from_pieces(dual.num_nodes(), 0.0);
  for (const auto& p : dual.pieces()) {
    from_pieces[p.node] += p.polygon.empty() ? p.measure : piece_measure(geometry_dim, p.polygon);
  }
  double total = 0.0;
  for (Index i = 0; i < dual.num_nodes(); ++i) {
    const double v = dual.voxel_measure(i);
    total += v;
    if (v > 0.0) {
      report.voxel_sum_deviation =
          std::max(report.voxel_sum_deviation, std::abs(v - from_pieces[i]) / v);
    } else {
      ++report.incidence_errors;
    }
  }
  report.total_deviation = std::abs(total - domain) / domain;
  return report;
}

}  // namespace

DualIdentityReport verify_dual_identities(const SimplicialMesh& mesh, const DualMesh& dual) {
  if (dual.num_nodes() != mesh.num_nodes() || dual.num_elements() != mesh.num_elements()) {
    throw InvalidArgument("dual does not match mesh");
  }
  return verify_impl(
      dual, mesh.num_elements(), mesh.dim(),
      [&](Index e) { return element_geometry(mesh, e).measure; },
      [&](Index e) {
        const auto v = mesh.element(e);
        return std::vector<Index>(v.begin(), v.end());
      });
}

DualIdentityReport verify_dual_identities(const TensorMesh& tmesh, const DualMesh& dual) {
  if (dual.num_nodes() != tmesh.num_nodes() || dual.num_elements() != tmesh.num_elements()) {
    throw InvalidArgument("dual does not match mesh");
  }
  return verify_impl(
      dual, tmesh.num_elements(), tmesh.dim(),
      [&](Index e) { return tmesh.element_measure(e); },
      [&](Index e) { return tmesh.element_nodes(e); });
}

}  // namespace voxquad
