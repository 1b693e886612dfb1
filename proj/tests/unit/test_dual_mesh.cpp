#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "voxquad/dual_mesh.hpp"
#include "voxquad/error.hpp"
#include "voxquad/quadrature.hpp"
#include "voxquad/random.hpp"

using namespace voxquad;

TEST(BarycentricDual, IntervalMidpoints) {
  const SimplicialMesh m = generate_interval_mesh(2, 0.0, 1.0);
  const DualMesh d = barycentric_dual(m);
  EXPECT_DOUBLE_EQ(d.voxel_measure(0), 0.25);
  EXPECT_DOUBLE_EQ(d.voxel_measure(1), 0.5);
  EXPECT_DOUBLE_EQ(d.voxel_measure(2), 0.25);
  for (std::size_t k : d.pieces_of_node(1)) {
    const auto& poly = d.piece(k).polygon;
    ASSERT_EQ(poly.size(), 2u);
    EXPECT_TRUE(poly[0].x == 0.25 || poly[0].x == 0.75 || poly[1].x == 0.25 || poly[1].x == 0.75);
  }
}

TEST(BarycentricDual, ReferenceTrianglePieces) {
  const SimplicialMesh m(2, {{0, 0}, {1, 0}, {0, 1}}, {0, 1, 2});
  const DualMesh d = barycentric_dual(m);
  ASSERT_EQ(d.pieces().size(), 3u);
  for (const VoxelPiece& p : d.pieces()) {
    EXPECT_NEAR(p.measure, 1.0 / 6.0, 1e-15);
    ASSERT_EQ(p.polygon.size(), 4u);
    EXPECT_EQ(p.polygon[0], m.node(p.node));
    EXPECT_GT(signed_area(p.polygon), 0.0);
    EXPECT_NEAR(p.polygon[2].x, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(p.polygon[2].y, 1.0 / 3.0, 1e-15);
  }
}

TEST(BarycentricDual, RandomTrianglesThirdOfArea) {
  Rng rng(42);
  for (int k = 0; k < 200; ++k) {
    Point a{rng.uniform(), rng.uniform()}, b{rng.uniform(), rng.uniform()}, c{rng.uniform(), rng.uniform()};
    const double area = oracle::triangle_area(a, b, c);
    if (area < 1e-4) continue;
    const SimplicialMesh m(2, {a, b, c}, {0, 1, 2});
    const DualMesh d = barycentric_dual(m);
    for (const VoxelPiece& p : d.pieces()) {
      EXPECT_NEAR(polygon_area(p.polygon) * 3.0 / area, 1.0, 1e-12);
    }
  }
}

TEST(TensorDual, CornerVoxel) {
  const SimplicialMesh c = generate_interval_mesh(2, 0.0, 1.0);
  const TensorMesh tm = tensor_product_mesh({c, c});
  const DualMesh parts[] = {barycentric_dual(c), barycentric_dual(c)};
  const DualMesh d = tensor_dual(tm, parts);
  EXPECT_DOUBLE_EQ(d.voxel_measure(0), 0.0625);
  EXPECT_DOUBLE_EQ(d.voxel_measure(4), 0.25);
  EXPECT_NEAR(d.total_measure(), 1.0, 1e-15);
}

TEST(TensorDual, UnitCellQuarter) {
  const SimplicialMesh c = generate_interval_mesh(1, 0.0, 1.0);
  const TensorMesh tm = tensor_product_mesh({c, c});
  const DualMesh parts[] = {barycentric_dual(c), barycentric_dual(c)};
  const DualMesh d = tensor_dual(tm, parts);
  EXPECT_EQ(d.nodes_per_element(), 4u);
  ASSERT_EQ(d.pieces().size(), 4u);
  for (const VoxelPiece& p : d.pieces()) EXPECT_DOUBLE_EQ(p.measure, 0.25);
}

TEST(TensorDual, SingleComponentIsIdentity) {
  const SimplicialMesh c = generate_interval_mesh(5, 0.0, 1.0);
  const DualMesh direct = barycentric_dual(c);
  const DualMesh parts[] = {direct};
  const DualMesh d = tensor_dual(tensor_product_mesh({c}), parts);
  for (Index i = 0; i < c.num_nodes(); ++i) EXPECT_DOUBLE_EQ(d.voxel_measure(i), direct.voxel_measure(i));
}

TEST(TensorDual, RejectsMismatchedComponents) {
  const SimplicialMesh c = generate_interval_mesh(2, 0.0, 1.0);
  const TensorMesh tm = tensor_product_mesh({c, c});
  const DualMesh one[] = {barycentric_dual(c)};
  EXPECT_THROW(tensor_dual(tm, one), InvalidArgument);
}

class DualIdentities : public ::testing::TestWithParam<std::size_t> {};

TEST_P(DualIdentities, DiskMeshes) {
  const SimplicialMesh m = generate_disk_mesh(GetParam());
  const DualMesh d = barycentric_dual(m);
  const DualIdentityReport r = verify_dual_identities(m, d);
  EXPECT_LE(r.piece_deviation, 1e-12);
  EXPECT_LE(r.total_deviation, 1e-12);
  EXPECT_LE(r.voxel_sum_deviation, 1e-12);
  EXPECT_EQ(r.incidence_errors, 0u);

  for (Index e = 0; e < m.num_elements(); ++e) {
    double sum = 0.0;
    for (std::size_t k : d.pieces_of_element(e)) sum += d.piece(k).measure;
    EXPECT_NEAR(sum / element_geometry(m, e).measure, 1.0, 1e-12);
  }
  // x_i lies in the closure of V_i: it is the first corner of each of its pieces.
  for (Index i = 0; i < m.num_nodes(); ++i) {
    for (std::size_t k : d.pieces_of_node(i)) EXPECT_EQ(d.piece(k).polygon.front(), m.node(i));
  }
}

TEST_P(DualIdentities, MassLumpExactOnP1) {
  const SimplicialMesh m = generate_disk_mesh(GetParam());
  const DualMesh d = barycentric_dual(m);
  std::vector<double> f(m.num_nodes());
  for (Index i = 0; i < m.num_nodes(); ++i) f[i] = 2.0 - m.node(i).x + 3.0 * m.node(i).y;
  // Exact integral of the linear interpolant: |T| times the vertex mean.
  double exact = 0.0;
  for (Index e = 0; e < m.num_elements(); ++e) {
    const auto idx = m.element(e);
    exact += oracle::triangle_area(m.node(idx[0]), m.node(idx[1]), m.node(idx[2])) *
             (f[idx[0]] + f[idx[1]] + f[idx[2]]) / 3.0;
  }
  EXPECT_NEAR(mass_lump(d, f) / exact, 1.0, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Rings, DualIdentities, ::testing::Values(1, 2, 4, 8, 16));

TEST(DualIdentities, TensorFourByFour) {
  const SimplicialMesh c = generate_interval_mesh(4, 0.0, 1.0);
  const TensorMesh tm = tensor_product_mesh({c, generate_interval_mesh(4, -1.0, 2.0)});
  const DualMesh parts[] = {barycentric_dual(tm.component(0)), barycentric_dual(tm.component(1))};
  const DualIdentityReport r = verify_dual_identities(tm, tensor_dual(tm, parts));
  EXPECT_LE(r.max_deviation(), 1e-12);
  EXPECT_EQ(r.incidence_errors, 0u);
}

TEST(DualIdentities, MassLumpExactOnBilinear) {
  const TensorMesh tm = tensor_product_mesh({generate_interval_mesh(3, 0.0, 1.0), generate_interval_mesh(5, 0.0, 2.0)});
  const DualMesh parts[] = {barycentric_dual(tm.component(0)), barycentric_dual(tm.component(1))};
  const DualMesh d = tensor_dual(tm, parts);
  std::vector<double> f(tm.num_nodes());
  for (Index i = 0; i < tm.num_nodes(); ++i) {
    const auto x = tm.node_coordinates(i);
    f[i] = 1.0 + x[0] * x[1];
  }
  // ∫_0^1 ∫_0^2 (1 + xy) dy dx = 2 + 1 = 3 (bilinear, interpolated exactly).
  EXPECT_NEAR(mass_lump(d, f), 3.0, 1e-13);
}

TEST(DualIdentities, CorruptedPieceIsReported) {
  const SimplicialMesh m = generate_disk_mesh(4);
  const DualMesh d = barycentric_dual(m);
  std::vector<VoxelPiece> pieces(d.pieces().begin(), d.pieces().end());
  const double before = pieces[5].measure;
  Polygon& poly = pieces[5].polygon;
  poly[2] = midpoint(poly[2], poly[0]);
  const double after = polygon_area(poly);
  pieces[5].measure = after;
  const DualMesh bad(d.dim(), d.num_nodes(), d.num_elements(), d.nodes_per_element(), std::move(pieces));
  const DualIdentityReport r = verify_dual_identities(m, bad);
  EXPECT_NEAR(r.piece_deviation, std::abs(after / before - 1.0), 1e-12);
}

TEST(DualIdentities, IntervalPinned) {
  const double pins[] = {std::numbers::pi / 5.0};
  const SimplicialMesh m = generate_interval_mesh(40, 0.0, 1.0, pins);
  const DualIdentityReport r = verify_dual_identities(m, barycentric_dual(m));
  EXPECT_LE(r.max_deviation(), 1e-12);
}
