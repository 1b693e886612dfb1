#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "voxquad/geometry.hpp"
#include "voxquad/mesh.hpp"

namespace voxquad {

/// The part of voxel V_i lying in element T.
///
/// `polygon` holds the piece geometry: interval endpoints for 1D meshes, a
/// counter-clockwise polygon for planar pieces. It is empty for tensor
/// products of ambient dimension above two, where only `measure` is tracked.
struct VoxelPiece {
  Index node = 0;
  Index element = 0;
  Polygon polygon;
  double measure = 0.0;
};

/// Piecewise-stored dual mesh. Voxels are never merged into single polygons.
class DualMesh {
 public:
  DualMesh() = default;
  /// `pieces` must list, for every element, one piece per element vertex.
  DualMesh(int dim, std::size_t num_nodes, std::size_t num_elements, std::size_t nodes_per_element,
           std::vector<VoxelPiece> pieces);

  int dim() const noexcept { return dim_; }
  std::size_t num_nodes() const noexcept { return voxel_measure_.size(); }
  std::size_t num_elements() const noexcept { return num_elements_; }
  std::size_t nodes_per_element() const noexcept { return nodes_per_element_; }

  std::span<const VoxelPiece> pieces() const noexcept { return pieces_; }
  const VoxelPiece& piece(std::size_t k) const { return pieces_[k]; }
  /// Indices into pieces() for the given node / element.
  std::span<const std::size_t> pieces_of_node(Index node) const;
  std::span<const std::size_t> pieces_of_element(Index element) const;

  /// |V_i|.
  double voxel_measure(Index node) const { return voxel_measure_[node]; }
  std::span<const double> voxel_measures() const noexcept { return voxel_measure_; }
  double total_measure() const;

 private:
  int dim_ = 0;
  std::size_t num_elements_ = 0;
  std::size_t nodes_per_element_ = 0;
  std::vector<VoxelPiece> pieces_;
  std::vector<double> voxel_measure_;
  std::vector<std::size_t> node_offsets_, node_pieces_;
  std::vector<std::size_t> element_offsets_, element_pieces_;
};

/// Barycentric dual: V_i ∩ T is the convex hull of the barycenters of all faces
/// of T containing x_i. Planar pieces are ordered (vertex, midpoint, centroid,
/// midpoint) counter-clockwise.
DualMesh barycentric_dual(const SimplicialMesh& mesh);

/// Product dual V_i = V_{i_1} x ... x V_{i_J}.
DualMesh tensor_dual(const TensorMesh& tmesh, std::span<const DualMesh> component_duals);

struct DualIdentityReport {
  /// max over pieces of | |V_i ∩ T| N_T / |T| - 1 |.
  double piece_deviation = 0.0;
  /// | sum_i |V_i| - |Omega| | / |Omega|.
  double total_deviation = 0.0;
  /// max over nodes of | |V_i| - sum of its pieces | / |V_i|.
  double voxel_sum_deviation = 0.0;
  /// Number of (node, element) incidences without a piece, or pieces on non-incident nodes.
  std::size_t incidence_errors = 0;

  double max_deviation() const;
};

/// Piece measures are recomputed from piece geometry where it is available.
DualIdentityReport verify_dual_identities(const SimplicialMesh& mesh, const DualMesh& dual);
DualIdentityReport verify_dual_identities(const TensorMesh& tmesh, const DualMesh& dual);

/// Measure of a stored piece polygon (length for 1D pieces).
double piece_measure(int dim, std::span<const Point> polygon);

}  // namespace voxquad
