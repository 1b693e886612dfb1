#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "voxquad/assembly.hpp"
#include "voxquad/error.hpp"
#include "voxquad/random.hpp"
#include "voxquad/studies.hpp"

namespace voxquad {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

VerifyCheck check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

std::vector<double> radial_psi(const SimplicialMesh& mesh, double kappa) {
  std::vector<double> psi(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) psi[i] = kappa * dot(mesh.node(i), mesh.node(i));
  return psi;
}

double max_entry_difference(const SparseOperator& a, const SparseOperator& b) {
  double worst = 0.0;
  for (const Triplet& t : a.triplets()) worst = std::max(worst, std::abs(t.value - b.at(t.row, t.col)));
  for (const Triplet& t : b.triplets()) worst = std::max(worst, std::abs(t.value - a.at(t.row, t.col)));
  return worst;
}

DualMesh corrupt(const DualMesh& dual) {
  std::vector<VoxelPiece> pieces(dual.pieces().begin(), dual.pieces().end());
  // Pull the centroid corner of one piece towards its vertex.
  Polygon& poly = pieces.front().polygon;
  poly[2] = midpoint(poly[2], poly[0]);
  return DualMesh(dual.dim(), dual.num_nodes(), dual.num_elements(), dual.nodes_per_element(),
                  std::move(pieces));
}

}  // namespace

std::vector<VerifyCheck> run_verify(const VerifyFaults& faults) {
  std::vector<VerifyCheck> checks;
  const std::vector<std::size_t> disk_rings{1, 2, 4, 8, 16};
  std::vector<SimplicialMesh> meshes;
  for (std::size_t r : disk_rings) meshes.push_back(generate_disk_mesh(r));
  const double pins[] = {std::numbers::pi / 5.0};
  meshes.push_back(generate_interval_mesh(7, 0.0, 1.0));
  meshes.push_back(generate_interval_mesh(40, 0.0, 1.0, pins));

  {
    double worst = 0.0;
    std::size_t incidence = 0;
    for (std::size_t k = 0; k < meshes.size(); ++k) {
      DualMesh dual = barycentric_dual(meshes[k]);
      if (faults.corrupt_voxel && k == 2) dual = corrupt(dual);
      const DualIdentityReport r = verify_dual_identities(meshes[k], dual);
      worst = std::max(worst, r.max_deviation());
      incidence += r.incidence_errors;
    }
    const TensorMesh tm = tensor_product_mesh({generate_interval_mesh(4, 0.0, 1.0), generate_interval_mesh(4, 0.0, 1.0)});
    const DualMesh parts[] = {barycentric_dual(tm.component(0)), barycentric_dual(tm.component(1))};
    const DualIdentityReport r = verify_dual_identities(tm, tensor_dual(tm, parts));
    worst = std::max(worst, r.max_deviation());
    incidence += r.incidence_errors;
    checks.push_back(check("dual identities", worst <= 1e-12 && incidence == 0,
                           "max relative deviation " + sci(worst)));
  }

  {
    double worst = 0.0;
    for (const SimplicialMesh& mesh : meshes) {
      const DualMesh dual = barycentric_dual(mesh);
      std::vector<double> f(mesh.num_nodes());
      for (Index i = 0; i < mesh.num_nodes(); ++i) f[i] = 1.0 + 2.0 * mesh.node(i).x - 0.5 * mesh.node(i).y;
      double exact = 0.0;
      for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto idx = mesh.element(e);
        double mean = 0.0;
        for (Index i : idx) mean += f[i];
        exact += element_geometry(mesh, e).measure * mean / static_cast<double>(idx.size());
      }
      worst = std::max(worst, std::abs(mass_lump(dual, f) - exact) / std::abs(exact));
    }
    checks.push_back(check("mass-lump exactness", worst <= 1e-12, "max relative error " + sci(worst)));
  }

  const EdgeWeight weight = faults.flip_bernoulli ? EdgeWeight([](double t) { return -bernoulli(t); })
                                                  : EdgeWeight(bernoulli);
  {
    double worst = 0.0;
    for (const SimplicialMesh& mesh : meshes) {
      const SparseOperator s = assemble_p1_stiffness(mesh);
      const SparseOperator a = assemble_eafe(mesh, std::vector<double>(mesh.num_nodes(), 0.0), weight);
      worst = std::max(worst, max_entry_difference(a, s) / std::max(1.0, s.max_abs()));
    }
    checks.push_back(check("EAFE psi=0 reduction", worst <= 1e-14, "max entry difference " + sci(worst)));
  }

  {
    double worst = 0.0;
    for (int k = -500; k <= 500; ++k) {
      const double t = 0.1 * k;
      const double lhs = bernoulli(-t);
      const double rhs = std::exp(t) * bernoulli(t);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
    }
    for (double t : {1e-12, 1e-8, 9.99e-5, 1.0001e-4}) {
      worst = std::max(worst, std::abs(bernoulli(-t) - std::exp(t) * bernoulli(t)) / bernoulli(-t));
    }
    checks.push_back(check("Bernoulli reflection identity", worst <= 1e-13, "max relative error " + sci(worst)));
  }

  {
    double worst_sum = 0.0, worst_offdiag = 0.0;
    for (const SimplicialMesh& mesh : meshes) {
      for (double kappa : {1.0, 5.0}) {
        const SparseOperator a = assemble_eafe(mesh, radial_psi(mesh, kappa), weight);
        for (double c : a.column_sums()) worst_sum = std::max(worst_sum, std::abs(c) / a.max_abs());
        const MMatrixReport m = check_m_matrix(a, 0);
        worst_offdiag = std::max(worst_offdiag, m.max_offdiagonal / m.max_abs);
      }
    }
    checks.push_back(check("EAFE column sums", worst_sum <= 1e-12, "max |column sum|/max|A| " + sci(worst_sum)));
    checks.push_back(check("EAFE sign pattern", worst_offdiag <= 1e-13,
                           "max off-diagonal/max|A| " + sci(worst_offdiag)));
  }

  {
    double min_inverse = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t rings : {2, 4, 8}) {
      const SimplicialMesh mesh = generate_disk_mesh(rings);
      const DualMesh dual = barycentric_dual(mesh);
      const SparseOperator a = assemble_eafe(mesh, radial_psi(mesh, 5.0), weight);
      const CoefficientSplit split{SplitMode::Lumping, [](Point x) { return 5.0 * std::exp(-5.0 * dot(x, x)); }};
      const ReactionWeights w =
          reaction_weights(mesh, dual, RegionSet::ball(Point{}, std::numbers::pi / 5.0), split);
      const MMatrixReport m = check_m_matrix(a + assemble_reaction_diagonal(w), 500);
      min_inverse = std::min(min_inverse, m.min_inverse_entry);
      ok = ok && m.passes();
    }
    checks.push_back(check("inverse positivity", ok, "min inverse entry " + sci(min_inverse)));
  }

  {
    double worst = 0.0;
    bool m_ok = true;
    for (auto [n1, n2] : {std::pair{3, 5}, std::pair{6, 4}, std::pair{9, 12}}) {
      const TensorMesh tm = tensor_product_mesh({generate_interval_mesh(n1, 0.0, 1.0), generate_interval_mesh(n2, 0.0, 2.0)});
      std::vector<SparseOperator> ops;
      std::vector<std::vector<double>> masses;
      for (std::size_t j = 0; j < 2; ++j) {
        const SimplicialMesh& c = tm.component(j);
        std::vector<double> psi(c.num_nodes());
        for (Index i = 0; i < c.num_nodes(); ++i) psi[i] = 1.5 * c.node(i).x;
        ops.push_back(assemble_eafe(c, psi, weight));
        const DualMesh d = barycentric_dual(c);
        masses.emplace_back(d.voxel_measures().begin(), d.voxel_measures().end());
      }
      const SparseOperator k = kronecker_assemble(tm, ops, masses);
      const std::size_t m1 = ops[0].rows(), m2 = ops[1].rows();
      for (std::size_t i1 = 0; i1 < m1; ++i1) {
        for (std::size_t i2 = 0; i2 < m2; ++i2) {
          for (std::size_t j1 = 0; j1 < m1; ++j1) {
            for (std::size_t j2 = 0; j2 < m2; ++j2) {
              double direct = 0.0;
              if (i2 == j2) direct += ops[0].at(i1, j1) * masses[1][i2];
              if (i1 == j1) direct += masses[0][i1] * ops[1].at(i2, j2);
              worst = std::max(worst, std::abs(direct - k.at(i1 * m2 + i2, j1 * m2 + j2)));
            }
          }
        }
      }
      std::vector<double> reaction(k.rows(), 0.0);
      for (std::size_t i = 0; i < k.rows(); i += 3) reaction[i] = 0.1;
      m_ok = m_ok && check_m_matrix(k + SparseOperator::diagonal(reaction), 500).passes();
    }
    checks.push_back(check("Kronecker assembly", worst <= 1e-13 && m_ok,
                           "max difference from direct assembly " + sci(worst)));
  }

  {
    std::size_t misses = 0;
    Rng rng(7);
    const int trials = 20;
    for (int k = 0; k < trials; ++k) {
      const Point a{rng.uniform() - 0.5, rng.uniform() - 0.5};
      const Polygon piece{a, a + Point{0.3, 0.05}, a + Point{0.2, 0.3}, a + Point{-0.05, 0.2}};
      const Ball ball{Point{}, 0.2 + 0.4 * rng.uniform()};
      const double exact = ball_polygon_area(piece, ball);
      const McEstimate mc = mc_integrate_piece(piece, [](Point) { return 1.0; },
                                               RegionSet::ball(ball.center, ball.radius), 20000,
                                               stream_seed(11, static_cast<std::uint64_t>(k), 3));
      if (std::abs(mc.estimate - exact) > 4.0 * mc.std_error + 1e-15) ++misses;
    }
    checks.push_back(check("Monte Carlo 4-sigma", misses == 0,
                           std::to_string(misses) + " of " + std::to_string(trials) + " outside 4 sigma"));
  }

  {
    double worst = 0.0;
    for (std::size_t rings : {2, 4, 8}) {
      const SimplicialMesh mesh = generate_disk_mesh(rings);
      const DualMesh dual = barycentric_dual(mesh);
      const SparseOperator a = assemble_eafe(mesh, std::vector<double>(mesh.num_nodes(), 0.0), weight);
      const CoefficientSplit split{SplitMode::Lumping, [](Point) { return 5.0; }};
      const ReactionWeights w = reaction_weights(mesh, dual, RegionSet::ball(Point{}, 2.0), split);
      const LinearSystem system = make_system(a + assemble_reaction_diagonal(w), assemble_load(dual));
      try {
        const std::vector<double> u = solve(system, SolveOptions{});
        for (double v : u) worst = std::max(worst, std::abs(v - 0.2));
      } catch (const Error&) {
        worst = std::numeric_limits<double>::infinity();
      }
    }
    checks.push_back(check("constant solution", worst <= 1e-10, "max deviation " + sci(worst)));
  }
  return checks;
}

}  // namespace voxquad
