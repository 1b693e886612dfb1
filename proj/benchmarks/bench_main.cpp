#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "voxquad/assembly.hpp"
#include "voxquad/random.hpp"
#include "voxquad/solver.hpp"

using namespace voxquad;

namespace {

const double kRstar = std::numbers::pi / 5.0;

std::vector<double> radial_psi(const SimplicialMesh& mesh, double kappa) {
  std::vector<double> psi(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) psi[i] = kappa * dot(mesh.node(i), mesh.node(i));
  return psi;
}

void BM_DiskMesh(benchmark::State& state) {
  const auto rings = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_disk_mesh(rings));
}
BENCHMARK(BM_DiskMesh)->Arg(16)->Arg(64);

void BM_BarycentricDual(benchmark::State& state) {
  const SimplicialMesh mesh = generate_disk_mesh(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(barycentric_dual(mesh));
}
BENCHMARK(BM_BarycentricDual)->Arg(16)->Arg(64);

void BM_AssembleEafe(benchmark::State& state) {
  const SimplicialMesh mesh = generate_disk_mesh(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> psi = radial_psi(mesh, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_eafe(mesh, psi));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * mesh.num_elements()));
}
BENCHMARK(BM_AssembleEafe)->Arg(16)->Arg(64);

void BM_BallPolygonArea(benchmark::State& state) {
  const DualMesh dual = barycentric_dual(generate_disk_mesh(32));
  const Ball ball{{0.0, 0.0}, kRstar};
  for (auto _ : state) {
    double sum = 0.0;
    for (const VoxelPiece& p : dual.pieces()) sum += ball_polygon_area(p.polygon, ball);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * dual.pieces().size()));
}
BENCHMARK(BM_BallPolygonArea);

void BM_ReferenceIntegral(benchmark::State& state) {
  const Polygon piece{{0.6, 0.0}, {0.66, 0.0}, {0.66, 0.05}, {0.6, 0.04}};
  const RegionSet k = RegionSet::ball({0.0, 0.0}, kRstar);
  const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference_region_integral(piece, [](Point x) { return std::exp(dot(x, x)); }, k, tol));
  }
}
BENCHMARK(BM_ReferenceIntegral)->Arg(8)->Arg(12);

void BM_MonteCarloPiece(benchmark::State& state) {
  const Polygon piece{{0.6, 0.0}, {0.66, 0.0}, {0.66, 0.05}, {0.6, 0.04}};
  const RegionSet k = RegionSet::ball({0.0, 0.0}, kRstar);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_integrate_piece(piece, [](Point x) { return std::exp(dot(x, x)); }, k, n, 7));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * state.range(0)));
}
BENCHMARK(BM_MonteCarloPiece)->Arg(10000);

void BM_SolveDisk(benchmark::State& state) {
  const SimplicialMesh mesh = generate_disk_mesh(static_cast<std::size_t>(state.range(0)));
  const DualMesh dual = barycentric_dual(mesh);
  const ReactionWeights w =
      reaction_weights(mesh, dual, RegionSet::ball({0.0, 0.0}, kRstar),
                       {SplitMode::Lumping, exponential_reaction(5.0, [](Point x) { return dot(x, x); })});
  const LinearSystem system =
      make_system(assemble_eafe(mesh, radial_psi(mesh, 1.0)) + assemble_reaction_diagonal(w), assemble_load(dual));
  for (auto _ : state) benchmark::DoNotOptimize(solve(system, {}));
}
BENCHMARK(BM_SolveDisk)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
