#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "voxquad/dual_mesh.hpp"
#include "voxquad/mesh.hpp"
#include "voxquad/quadrature.hpp"
#include "voxquad/region.hpp"
#include "voxquad/sparse.hpp"

namespace voxquad {

/// ∫ ∇φ_i · ∇φ_j over the mesh.
SparseOperator assemble_p1_stiffness(const SimplicialMesh& mesh);

/// B(t) = t / (e^t - 1), B(0) = 1.
double bernoulli(double t);

using EdgeWeight = std::function<double(double)>;

/// Edge-average (exponentially fitted) transport operator for -∇·(∇u + u∇ψ).
///
/// A_ji = w(ψ_j - ψ_i) S_ji for j ≠ i, where S is the P1 stiffness matrix and
/// w defaults to the Bernoulli function; A_ii = -Σ_{k≠i} A_ki so that every
/// column sums to zero.
SparseOperator assemble_eafe(const SimplicialMesh& mesh, std::span<const double> psi,
                             const EdgeWeight& edge_weight = bernoulli);

/// diag(w_i). Throws on a negative weight.
SparseOperator assemble_reaction_diagonal(const ReactionWeights& weights);

/// ∫ λ 1_K φ_i φ_j with elements split into three cases: inside the ball
/// (degree-4 rule), outside the enlarged radius √((h/2)² + r²) (zero), and
/// the rest (Monte Carlo with one stream per element). Ball regions only.
SparseOperator assemble_galerkin_reaction(const SimplicialMesh& mesh, const RegionSet& region,
                                          const ScalarField& lambda,
                                          const IntegrationSettings& settings = {});

/// Exact P1 mass matrix ∫ φ_i φ_j.
SparseOperator assemble_p1_mass(const SimplicialMesh& mesh);

/// (f_h)_i = |V_i|, the exact load of f ≡ 1.
std::vector<double> assemble_load(const DualMesh& dual);
/// (f_h)_i = f_i |V_i|.
std::vector<double> assemble_load(const DualMesh& dual, std::span<const double> f);
/// (f_h)_i = f(x_i) |V_i|.
std::vector<double> assemble_load(const SimplicialMesh& mesh, const DualMesh& dual,
                                  const ScalarField& f);

struct LinearSystem {
  SparseOperator matrix;
  std::vector<double> rhs;
  /// Original index of each remaining unknown.
  std::vector<Index> free_nodes;
};

LinearSystem make_system(SparseOperator matrix, std::vector<double> rhs);

/// Removes the listed unknowns, moving -A[:, D] u_D to the right-hand side.
/// Every listed node must be a boundary node of `mesh`.
LinearSystem eliminate_dirichlet(const LinearSystem& system, const SimplicialMesh& mesh,
                                 std::span<const Index> dirichlet_nodes,
                                 std::span<const double> values);

/// Σ_j M̃¹ ⊗ … ⊗ Aʲ ⊗ … ⊗ M̃ᴶ in the lexicographic node order of `tmesh`.
SparseOperator kronecker_assemble(const TensorMesh& tmesh,
                                  std::span<const SparseOperator> transports,
                                  std::span<const std::vector<double>> lumped_masses);

struct MMatrixReport {
  std::size_t size = 0;
  double max_abs = 0.0;
  double max_offdiagonal = 0.0;
  std::size_t max_offdiagonal_row = 0;
  std::size_t max_offdiagonal_col = 0;
  double min_diagonal = 0.0;
  /// min over columns of a_jj - Σ_{i≠j} |a_ij|.
  double min_column_dominance = 0.0;
  bool inverse_checked = false;
  double min_inverse_entry = 0.0;

  /// Off-diagonals ≤ tol·max|A|, positive diagonal, and (when computed) an
  /// inverse with entries ≥ -inverse_tol.
  bool passes(double tol = 1e-13, double inverse_tol = 1e-12) const;
};

MMatrixReport check_m_matrix(const SparseOperator& a, std::size_t dense_threshold = 500);

}  // namespace voxquad
