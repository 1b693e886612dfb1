#include "voxquad/quadrature.hpp"

#include <array>
#include <cmath>

#include "voxquad/error.hpp"
#include "voxquad/random.hpp"

namespace voxquad {

namespace {

constexpr std::uint64_t kVoxelSalt = 0x766f78656cULL;

void require_nonnegative(double value) {
  if (value < 0.0 || std::isnan(value)) throw InvalidArgument("nonnegativity violated");
}

ScalarField checked(const ScalarField& lambda) {
  return [&lambda](Point x) {
    const double value = lambda(x);
    require_nonnegative(value);
    return value;
  };
}

// 5-point Gauss-Legendre on [lo, hi], composite over `parts` pieces.
double gauss_interval(const ScalarField& f, double lo, double hi, int parts = 4) {
  static constexpr std::array<double, 5> kNodes = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                   -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> kWeights = {0.5688888888888889, 0.4786286704993665,
                                                     0.4786286704993665, 0.2369268850561891,
                                                     0.2369268850561891};
  if (!(hi > lo)) return 0.0;
  const double step = (hi - lo) / parts;
  double sum = 0.0;
  for (int p = 0; p < parts; ++p) {
    const double mid = lo + (p + 0.5) * step;
    for (std::size_t k = 0; k < kNodes.size(); ++k) {
      sum += kWeights[k] * f(Point{mid + 0.5 * step * kNodes[k], 0.0});
    }
  }
  return 0.5 * step * sum;
}

bool exact_region(const RegionSet& region) { return region.kind() != RegionKind::Generic; }

double piece_region_measure(int dim, const VoxelPiece& piece, const RegionSet& region, double tol) {
  if (dim == 1) return region_interval_length(piece.polygon[0].x, piece.polygon[1].x, region);
  return region_polygon_area(piece.polygon, region, tol);
}

double piece_region_integral(int dim, const VoxelPiece& piece, const ScalarField& weight,
                             const RegionSet& region, double tol) {
  if (dim == 1) {
    const auto [lo, hi] = region_interval(piece.polygon[0].x, piece.polygon[1].x, region);
    return gauss_interval(weight, lo, hi);
  }
  return reference_region_integral(piece.polygon, weight, region, tol);
}

}  // namespace

ScalarField exponential_reaction(double lambda_bar, ScalarField psi) {
  return [lambda_bar, psi = std::move(psi)](Point x) { return lambda_bar * std::exp(-psi(x)); };
}

ReactionWeights reaction_weights(const SimplicialMesh& mesh, const DualMesh& dual,
                                 const RegionSet& region, const CoefficientSplit& split,
                                 const IntegrationSettings& settings) {
  if (!split.lambda) throw InvalidArgument("reaction coefficient is empty");
  if (dual.num_nodes() != mesh.num_nodes()) throw InvalidArgument("dual does not match mesh");
  const std::size_t n = mesh.num_nodes();
  const int dim = dual.dim();
  if (dim == 1 && !exact_region(region)) {
    throw InvalidArgument("1D reaction weights need a ball or half-plane region");
  }
  ReactionWeights result;
  result.mode = split.mode;
  result.weights.assign(n, 0.0);
  result.std_error.assign(n, 0.0);
  const ScalarField lambda = checked(split.lambda);

  if (split.mode == SplitMode::Lumping) {
    for (Index i = 0; i < n; ++i) {
      double measure = 0.0;
      for (std::size_t k : dual.pieces_of_node(i)) {
        measure += piece_region_measure(dim, dual.piece(k), region, settings.oracle_tol);
      }
      result.weights[i] = measure > 0.0 ? lambda(mesh.node(i)) * measure : 0.0;
    }
    return result;
  }

  const bool monte_carlo = settings.integrator == Integrator::MonteCarlo && dim == 2;
  const std::uint64_t budget =
      monte_carlo ? sample_budget(mesh_size(mesh), settings.samples_per_h2, settings.sample_cap) : 0;
  std::vector<Polygon> polygons;
  for (Index i = 0; i < n; ++i) {
    const auto pieces = dual.pieces_of_node(i);
    if (exact_region(region)) {
      // Voxels disjoint from K carry an exactly zero weight.
      double measure = 0.0;
      for (std::size_t k : pieces) measure += piece_region_measure(dim, dual.piece(k), region, 0.0);
      if (measure == 0.0) continue;
    }
    if (monte_carlo) {
      polygons.clear();
      for (std::size_t k : pieces) polygons.push_back(dual.piece(k).polygon);
      const McEstimate mc = mc_integrate_union(polygons, lambda, region, budget,
                                               stream_seed(settings.seed, i, kVoxelSalt));
      result.weights[i] = mc.estimate;
      result.std_error[i] = mc.std_error;
    } else {
      double sum = 0.0;
      for (std::size_t k : pieces) {
        sum += piece_region_integral(dim, dual.piece(k), lambda, region, settings.oracle_tol);
      }
      result.weights[i] = sum;
    }
  }
  return result;
}

double apply_Q(const ReactionWeights& weights, std::span<const double> u, std::span<const double> v) {
  const std::size_t n = weights.weights.size();
  if (u.size() != n || v.size() != n) throw InvalidArgument("length mismatch in apply_Q");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += u[i] * v[i] * weights.weights[i];
  return sum;
}

double mass_lump(const DualMesh& dual, std::span<const double> f) {
  if (f.size() != dual.num_nodes()) throw InvalidArgument("length mismatch in mass_lump");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * dual.voxel_measure(i);
  return sum;
}

double local_error(const SimplicialMesh& mesh, const DualMesh& dual, Index element,
                   const RegionSet& region, const CoefficientSplit& split,
                   std::span<const double> u, std::span<const double> v, double oracle_tol) {
  if (mesh.dim() != 2) throw InvalidArgument("local_error needs a 2D mesh");
  if (!(oracle_tol > 0.0)) throw InvalidArgument("oracle tolerance must be positive");
  if (u.size() != mesh.num_nodes() || v.size() != mesh.num_nodes()) {
    throw InvalidArgument("length mismatch in local_error");
  }
  if (element >= mesh.num_elements()) throw InvalidArgument("element index out of range");
  const auto idx = mesh.element(element);
  const Point a = mesh.node(idx[0]);
  const Point b = mesh.node(idx[1]);
  const Point c = mesh.node(idx[2]);
  const ScalarField lambda = checked(split.lambda);

  const ScalarField integrand = [&](Point x) {
    const auto l = barycentric(a, b, c, x);
    const double uh = l[0] * u[idx[0]] + l[1] * u[idx[1]] + l[2] * u[idx[2]];
    const double vh = l[0] * v[idx[0]] + l[1] * v[idx[1]] + l[2] * v[idx[2]];
    return lambda(x) * uh * vh;
  };
  const std::array<Point, 3> tri{a, b, c};
  const double exact = reference_region_integral(tri, integrand, region, oracle_tol);

  double quadrature = 0.0;
  for (std::size_t k : dual.pieces_of_element(element)) {
    const VoxelPiece& piece = dual.piece(k);
    const double uv = u[piece.node] * v[piece.node];
    if (split.mode == SplitMode::Lumping) {
      const double measure = region_polygon_area(piece.polygon, region, oracle_tol);
      quadrature += measure > 0.0 ? uv * lambda(mesh.node(piece.node)) * measure : 0.0;
    } else {
      quadrature += uv * reference_region_integral(piece.polygon, lambda, region, oracle_tol);
    }
  }
  return exact - quadrature;
}

}  // namespace voxquad
