#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "voxquad/geometry.hpp"

namespace voxquad {

using Index = std::size_t;

/// Conforming simplicial mesh of an interval (dim 1) or a polygon (dim 2).
///
/// Elements are stored as flat connectivity with stride `dim + 1`. Two-dimensional
/// elements are reoriented on construction so that every triangle has positive
/// signed area. Boundary nodes and edges are derived from the topology unless
/// given explicitly.
class SimplicialMesh {
 public:
  SimplicialMesh() = default;
  SimplicialMesh(int dim, std::vector<Point> nodes, std::vector<Index> connectivity,
                 std::vector<Index> boundary_nodes = {});

  int dim() const noexcept { return dim_; }
  int nodes_per_element() const noexcept { return dim_ + 1; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_elements() const noexcept {
    return dim_ == 0 ? 0 : connectivity_.size() / static_cast<std::size_t>(dim_ + 1);
  }

  const Point& node(Index i) const { return nodes_[i]; }
  std::span<const Point> nodes() const noexcept { return nodes_; }
  std::span<const Index> element(Index e) const {
    const auto stride = static_cast<std::size_t>(dim_ + 1);
    return std::span<const Index>(connectivity_).subspan(e * stride, stride);
  }
  std::span<const Index> connectivity() const noexcept { return connectivity_; }

  /// Sorted list of boundary node indices.
  std::span<const Index> boundary_nodes() const noexcept { return boundary_nodes_; }
  bool is_boundary_node(Index i) const;
  /// Boundary edges as node pairs (2D only; empty for 1D meshes).
  std::span<const std::pair<Index, Index>> boundary_edges() const noexcept {
    return boundary_edges_;
  }

  /// Sum of element measures.
  double total_measure() const;

 private:
  int dim_ = 0;
  std::vector<Point> nodes_;
  std::vector<Index> connectivity_;
  std::vector<Index> boundary_nodes_;
  std::vector<std::pair<Index, Index>> boundary_edges_;
};

struct ElementGeometry {
  double measure = 0.0;
  /// Constant gradient of each vertex's P1 basis function (1D uses `x` only).
  std::vector<Point> gradients;
  double diameter = 0.0;
  double inradius = 0.0;
};

/// Throws InvalidArgument on an out-of-range index or a degenerate element.
ElementGeometry element_geometry(const SimplicialMesh& mesh, Index element);

/// Largest element diameter.
double mesh_size(const SimplicialMesh& mesh);
/// Largest diameter / inradius over all elements.
double nondegeneracy_ratio(const SimplicialMesh& mesh);

/// Topology checks: every edge is shared by one (boundary) or two (interior) elements.
struct MeshTopologyReport {
  std::size_t interior_edges = 0;
  std::size_t boundary_edges = 0;
  std::size_t overloaded_edges = 0;  // edges with more than two elements
  double min_signed_measure = 0.0;
  bool ok() const { return overloaded_edges == 0 && min_signed_measure > 0.0; }
};
MeshTopologyReport check_topology(const SimplicialMesh& mesh);

/// `n` elements on [a, b]. Every pinned coordinate becomes a node exactly; the
/// elements between consecutive pins are uniform.
SimplicialMesh generate_interval_mesh(std::size_t n, double a, double b,
                                      std::span<const double> pinned = {});

/// Unit-disk triangulation built from concentric rings: ring k (k = 1..rings)
/// carries 6k nodes at radius k/rings. Bands are triangulated by an angular
/// merge and then made Delaunay by edge flips.
SimplicialMesh generate_disk_mesh(std::size_t rings);

/// Plain-text mesh format (see README): `dim`, `nodes`, `elements`, optional `boundary`.
SimplicialMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const SimplicialMesh& mesh, const std::filesystem::path& path);

/// Tensor product of simplicial meshes with lexicographic node numbering
/// (the last component varies fastest).
class TensorMesh {
 public:
  explicit TensorMesh(std::vector<SimplicialMesh> components);

  std::size_t num_components() const noexcept { return components_.size(); }
  const SimplicialMesh& component(std::size_t j) const { return components_[j]; }
  int dim() const noexcept { return dim_; }

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_elements() const noexcept { return num_elements_; }
  /// N_T = prod (d_j + 1).
  std::size_t nodes_per_element() const noexcept { return nodes_per_element_; }

  std::vector<Index> node_multi_index(Index node) const;
  Index node_index(std::span<const Index> multi) const;
  std::vector<Index> element_multi_index(Index element) const;
  Index element_index(std::span<const Index> multi) const;

  /// Product-element node list in lexicographic order of local vertices.
  std::vector<Index> element_nodes(Index element) const;
  /// Product of component element measures.
  double element_measure(Index element) const;
  /// Concatenated component coordinates (length dim()).
  std::vector<double> node_coordinates(Index node) const;

 private:
  std::vector<SimplicialMesh> components_;
  int dim_ = 0;
  std::size_t num_nodes_ = 1;
  std::size_t num_elements_ = 1;
  std::size_t nodes_per_element_ = 1;
};

TensorMesh tensor_product_mesh(std::vector<SimplicialMesh> components);

}  // namespace voxquad
