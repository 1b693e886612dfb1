#include "voxquad/assembly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "voxquad/error.hpp"
#include "voxquad/random.hpp"

namespace voxquad {

namespace {

constexpr std::uint64_t kElementSalt = 0x656c656d656e74ULL;

}  // namespace

SparseOperator assemble_p1_stiffness(const SimplicialMesh& mesh) {
  const auto npe = static_cast<std::size_t>(mesh.nodes_per_element());
  std::vector<Triplet> t;
  t.reserve(mesh.num_elements() * npe * npe);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    const auto idx = mesh.element(e);
    for (std::size_t a = 0; a < npe; ++a) {
      for (std::size_t b = 0; b < npe; ++b) {
        t.push_back({idx[a], idx[b], g.measure * dot(g.gradients[a], g.gradients[b])});
      }
    }
  }
  return SparseOperator::from_triplets(mesh.num_nodes(), mesh.num_nodes(), std::move(t));
}

double bernoulli(double t) {
  if (std::abs(t) < 1e-4) {
    // t/(e^t - 1) = 1 - t/2 + t^2/12 - t^4/720 + ...
    const double t2 = t * t;
    return 1.0 - 0.5 * t + t2 / 12.0 - t2 * t2 / 720.0;
  }
  return t / std::expm1(t);
}

SparseOperator assemble_eafe(const SimplicialMesh& mesh, std::span<const double> psi,
                             const EdgeWeight& edge_weight) {
  if (psi.size() != mesh.num_nodes()) throw InvalidArgument("psi length does not match the mesh");
  for (double p : psi) {
    if (!std::isfinite(p)) throw InvalidArgument("non-finite psi");
  }
  const SparseOperator s = assemble_p1_stiffness(mesh);
  std::vector<Triplet> t;
  t.reserve(s.nonzeros());
  std::vector<double> diagonal(mesh.num_nodes(), 0.0);
  const auto offsets = s.row_offsets();
  const auto cols = s.column_indices();
  const auto vals = s.values();
  for (std::size_t j = 0; j < s.rows(); ++j) {
    for (std::size_t k = offsets[j]; k < offsets[j + 1]; ++k) {
      const std::size_t i = cols[k];
      if (i == j) continue;
      const double a_ji = edge_weight(psi[j] - psi[i]) * vals[k];
      t.push_back({j, i, a_ji});
      diagonal[i] -= a_ji;
    }
  }
  for (std::size_t i = 0; i < diagonal.size(); ++i) t.push_back({i, i, diagonal[i]});
  return SparseOperator::from_triplets(mesh.num_nodes(), mesh.num_nodes(), std::move(t));
}

SparseOperator assemble_reaction_diagonal(const ReactionWeights& weights) {
  for (double w : weights.weights) {
    if (!(w >= 0.0)) throw InvalidArgument("negative reaction weight");
  }
  return SparseOperator::diagonal(weights.weights);
}

SparseOperator assemble_p1_mass(const SimplicialMesh& mesh) {
  const auto npe = static_cast<std::size_t>(mesh.nodes_per_element());
  // ∫ φ_a φ_b = |T| (1 + δ_ab) / ((d + 1)(d + 2)).
  const double scale = 1.0 / static_cast<double>(npe * (npe + 1));
  std::vector<Triplet> t;
  t.reserve(mesh.num_elements() * npe * npe);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const double m = element_geometry(mesh, e).measure;
    const auto idx = mesh.element(e);
    for (std::size_t a = 0; a < npe; ++a) {
      for (std::size_t b = 0; b < npe; ++b) t.push_back({idx[a], idx[b], m * scale * (a == b ? 2.0 : 1.0)});
    }
  }
  return SparseOperator::from_triplets(mesh.num_nodes(), mesh.num_nodes(), std::move(t));
}

SparseOperator assemble_galerkin_reaction(const SimplicialMesh& mesh, const RegionSet& region,
                                          const ScalarField& lambda,
                                          const IntegrationSettings& settings) {
  if (region.kind() != RegionKind::Ball) throw InvalidArgument("three-case assembly requires ball");
  if (mesh.dim() != 2) throw InvalidArgument("three-case assembly needs a 2D mesh");
  const Ball& ball = region.as_ball();
  const double h = mesh_size(mesh);
  // Elements with every vertex outside this radius cannot meet the ball.
  const double outer = std::sqrt(0.25 * h * h + ball.radius * ball.radius);
  const ElementClassification tags = classify_elements(mesh, region);
  const std::uint64_t budget = sample_budget(h, settings.samples_per_h2, settings.sample_cap);

  std::vector<Triplet> t;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto idx = mesh.element(e);
    const std::array<Point, 3> v{mesh.node(idx[0]), mesh.node(idx[1]), mesh.node(idx[2])};
    bool outside = true;
    for (const Point& p : v) outside = outside && distance(p, ball.center) > outer;
    if (outside || tags.tags[e] == ElementTag::Exterior) continue;

    const double area2 = 2.0 * signed_area(v[0], v[1], v[2]);
    std::array<double, 9> local{};
    if (tags.tags[e] == ElementTag::Interior) {
      for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a; b < 3; ++b) {
          const double value = triangle_quadrature(
              [&](Point x) {
                const auto l = barycentric(v[0], v[1], v[2], x);
                return lambda(x) * l[a] * l[b];
              },
              v[0], v[1], v[2]);
          local[3 * a + b] = value;
          local[3 * b + a] = value;
        }
      }
    } else {
      Rng rng(stream_seed(settings.seed, e, kElementSalt));
      std::array<double, 9> sum{};
      for (std::uint64_t s = 0; s < budget; ++s) {
        double r1 = rng.uniform();
        double r2 = rng.uniform();
        if (r1 + r2 > 1.0) {
          r1 = 1.0 - r1;
          r2 = 1.0 - r2;
        }
        const Point x = v[0] + r1 * (v[1] - v[0]) + r2 * (v[2] - v[0]);
        if (!region.contains(x)) continue;
        const double lx = lambda(x);
        const std::array<double, 3> l{1.0 - r1 - r2, r1, r2};
        for (std::size_t a = 0; a < 3; ++a) {
          for (std::size_t b = a; b < 3; ++b) sum[3 * a + b] += lx * l[a] * l[b];
        }
      }
      const double scale = 0.5 * area2 / static_cast<double>(budget);
      for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a; b < 3; ++b) {
          local[3 * a + b] = scale * sum[3 * a + b];
          local[3 * b + a] = local[3 * a + b];
        }
      }
    }
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) t.push_back({idx[a], idx[b], local[3 * a + b]});
    }
  }
  return SparseOperator::from_triplets(mesh.num_nodes(), mesh.num_nodes(), std::move(t));
}

std::vector<double> assemble_load(const DualMesh& dual) {
  const auto m = dual.voxel_measures();
  return std::vector<double>(m.begin(), m.end());
}

std::vector<double> assemble_load(const DualMesh& dual, std::span<const double> f) {
  if (f.size() != dual.num_nodes()) throw InvalidArgument("load length does not match the dual mesh");
  std::vector<double> b(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) b[i] = f[i] * dual.voxel_measure(i);
  return b;
}

std::vector<double> assemble_load(const SimplicialMesh& mesh, const DualMesh& dual,
                                  const ScalarField& f) {
  std::vector<double> values(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) values[i] = f(mesh.node(i));
  return assemble_load(dual, values);
}

LinearSystem make_system(SparseOperator matrix, std::vector<double> rhs) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("system matrix must be square");
  if (rhs.size() != matrix.rows()) throw InvalidArgument("rhs length does not match the matrix");
  LinearSystem s;
  s.free_nodes.resize(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) s.free_nodes[i] = i;
  s.matrix = std::move(matrix);
  s.rhs = std::move(rhs);
  return s;
}

LinearSystem eliminate_dirichlet(const LinearSystem& system, const SimplicialMesh& mesh,
                                 std::span<const Index> dirichlet_nodes,
                                 std::span<const double> values) {
  if (dirichlet_nodes.size() != values.size()) {
    throw InvalidArgument("one Dirichlet value per node is required");
  }
  const std::size_t n = system.matrix.rows();
  if (n != system.free_nodes.size()) throw InvalidArgument("system already reduced");
  std::vector<double> fixed(n, 0.0);
  std::vector<bool> is_fixed(n, false);
  for (std::size_t k = 0; k < dirichlet_nodes.size(); ++k) {
    const Index node = dirichlet_nodes[k];
    if (node >= n || !mesh.is_boundary_node(node)) {
      throw InvalidArgument("Dirichlet node is not on the boundary");
    }
    is_fixed[node] = true;
    fixed[node] = values[k];
  }
  std::vector<std::size_t> new_index(n, std::numeric_limits<std::size_t>::max());
  LinearSystem out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_fixed[i]) {
      new_index[i] = out.free_nodes.size();
      out.free_nodes.push_back(system.free_nodes[i]);
    }
  }
  const std::vector<double> lift = system.matrix.multiply(fixed);
  out.rhs.reserve(out.free_nodes.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_fixed[i]) out.rhs.push_back(system.rhs[i] - lift[i]);
  }
  std::vector<Triplet> t;
  for (const Triplet& x : system.matrix.triplets()) {
    if (!is_fixed[x.row] && !is_fixed[x.col]) t.push_back({new_index[x.row], new_index[x.col], x.value});
  }
  const std::size_t m = out.free_nodes.size();
  out.matrix = SparseOperator::from_triplets(m, m, std::move(t));
  return out;
}

SparseOperator kronecker_assemble(const TensorMesh& tmesh,
                                  std::span<const SparseOperator> transports,
                                  std::span<const std::vector<double>> lumped_masses) {
  const std::size_t count = tmesh.num_components();
  if (transports.size() != count || lumped_masses.size() != count) {
    throw InvalidArgument("one transport operator and lumped mass per component is required");
  }
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t nj = tmesh.component(j).num_nodes();
    if (transports[j].rows() != nj || transports[j].cols() != nj || lumped_masses[j].size() != nj) {
      throw InvalidArgument("component operator dimension mismatch");
    }
  }
  if (count == 1) return transports[0];
  SparseOperator total;
  for (std::size_t j = 0; j < count; ++j) {
    SparseOperator term = j == 0 ? transports[0] : SparseOperator::diagonal(lumped_masses[0]);
    for (std::size_t k = 1; k < count; ++k) {
      term = kronecker(term, k == j ? transports[k] : SparseOperator::diagonal(lumped_masses[k]));
    }
    total = j == 0 ? std::move(term) : total + term;
  }
  return total;
}

bool MMatrixReport::passes(double tol, double inverse_tol) const {
  if (max_offdiagonal > tol * max_abs) return false;
  if (!(min_diagonal > 0.0)) return false;
  if (inverse_checked && min_inverse_entry < -inverse_tol) return false;
  return true;
}

MMatrixReport check_m_matrix(const SparseOperator& a, std::size_t dense_threshold) {
  if (a.rows() != a.cols()) throw InvalidArgument("M-matrix check needs a square matrix");
  const std::size_t n = a.rows();
  MMatrixReport r;
  r.size = n;
  r.max_abs = a.max_abs();
  r.max_offdiagonal = -std::numeric_limits<double>::infinity();
  r.min_diagonal = std::numeric_limits<double>::infinity();
  std::vector<double> dominance(n, 0.0);
  const auto offsets = a.row_offsets();
  const auto cols = a.column_indices();
  const auto vals = a.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const std::size_t j = cols[k];
      if (i == j) {
        dominance[j] += vals[k];
        continue;
      }
      dominance[j] -= std::abs(vals[k]);
      if (vals[k] > r.max_offdiagonal) {
        r.max_offdiagonal = vals[k];
        r.max_offdiagonal_row = i;
        r.max_offdiagonal_col = j;
      }
    }
  }
  const std::vector<double> diag = a.diagonal_values();
  for (double d : diag) r.min_diagonal = std::min(r.min_diagonal, d);
  r.min_column_dominance = n == 0 ? 0.0 : *std::min_element(dominance.begin(), dominance.end());
  if (r.max_offdiagonal == -std::numeric_limits<double>::infinity()) r.max_offdiagonal = 0.0;
  if (n == 0) r.min_diagonal = 0.0;

  if (n > 0 && n <= dense_threshold) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const Triplet& x : a.triplets()) {
      dense(static_cast<Eigen::Index>(x.row), static_cast<Eigen::Index>(x.col)) = x.value;
    }
    const Eigen::MatrixXd inverse = dense.fullPivLu().inverse();
    r.inverse_checked = true;
    r.min_inverse_entry = inverse.minCoeff();
  }
  return r;
}

}  // namespace voxquad
