#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "voxquad/assembly.hpp"
#include "voxquad/dual_mesh.hpp"
#include "voxquad/mesh.hpp"
#include "voxquad/region.hpp"
#include "voxquad/sparse.hpp"

namespace voxquad {

enum class SolveMethod { Krylov, Dense, Stationary };

std::string to_string(SolveMethod method);

struct SolveReport {
  std::size_t iterations = 0;
  /// ‖b - Ax‖₂ / ‖b‖₂ (absolute when b = 0).
  double residual = 0.0;
  SolveMethod method = SolveMethod::Krylov;
};

struct SolveOptions {
  double tol = 1e-10;
  /// 0 means 10 n.
  std::size_t max_iter = 0;
  /// Systems up to this size fall back to a dense LU factorization.
  std::size_t dense_limit = 2000;
};

/// Nodal values of a P1 field on a simplicial mesh.
struct FeField {
  const SimplicialMesh* mesh = nullptr;
  std::vector<double> values;
};

/// Jacobi-preconditioned BiCGStab; on stagnation, a dense LU (n ≤ dense_limit)
/// and then Gauss-Seidel. Throws ConvergenceError carrying the best residual.
std::vector<double> solve(const LinearSystem& system, const SolveOptions& options,
                          SolveReport* report = nullptr);

/// Solves and scatters the free unknowns back to mesh numbering (eliminated
/// nodes are set from `fixed`, zero by default).
FeField solve_field(const SimplicialMesh& mesh, const LinearSystem& system,
                    const SolveOptions& options, SolveReport* report = nullptr,
                    std::span<const double> fixed = {});

/// √(Σ |V_i| v_i²).
double discrete_l2_norm(const DualMesh& dual, std::span<const double> values);
/// √(Σ |V_i| (a_i - r_i)² / Σ |V_i| r_i²).
double discrete_l2_relative_error(const DualMesh& dual, std::span<const double> approx,
                                  std::span<const double> reference);
/// √((u - v)ᵀ S (u - v)).
double h1_seminorm_diff(const SparseOperator& stiffness, std::span<const double> u,
                        std::span<const double> v);

FeField interpolate(const SimplicialMesh& mesh, const ScalarField& f);
/// P1 value at `x`. Throws InvalidArgument when x lies outside the mesh.
double evaluate(const FeField& field, Point x);

}  // namespace voxquad
