#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "voxquad/dual_mesh.hpp"
#include "voxquad/mesh.hpp"
#include "voxquad/region.hpp"

namespace voxquad {

/// How λ = λ₁λ₂ is split between the nodal factor and the voxel integral.
///
/// Lumping: λ₁ = λ, λ₂ ≡ 1, giving w_i = λ(x_i) |V_i ∩ K|.
/// Averaging: λ₁ ≡ 1, λ₂ = λ, giving w_i = ∫_{V_i ∩ K} λ dx.
enum class SplitMode { Lumping, Averaging };

struct CoefficientSplit {
  SplitMode mode = SplitMode::Lumping;
  ScalarField lambda;
};

/// x ↦ λ̄ e^{-ψ(x)}.
ScalarField exponential_reaction(double lambda_bar, ScalarField psi);

enum class Integrator { MonteCarlo, Adaptive };

/// How integrals of non-constant weights over voxel ∩ K are computed.
struct IntegrationSettings {
  Integrator integrator = Integrator::MonteCarlo;
  std::uint64_t seed = 20240901;
  /// Samples per voxel are floor(samples_per_h2 / h^2), capped.
  double samples_per_h2 = 1000.0;
  std::uint64_t sample_cap = 10'000'000;
  /// Tolerance of the adaptive integrator (also used for generic-region areas).
  double oracle_tol = 1e-10;
};

struct ReactionWeights {
  std::vector<double> weights;
  /// Monte Carlo standard error per node; zero on deterministic paths.
  std::vector<double> std_error;
  SplitMode mode = SplitMode::Lumping;
};

/// w_i = λ₁(x_i) ∫_{V_i} λ₂ 1_K dx for every node.
///
/// Lumping with a ball or half-plane uses exact intersection areas. Averaging
/// samples each voxel with its own random stream, or uses the adaptive
/// integrator. Throws InvalidArgument("nonnegativity violated") when λ < 0 is
/// encountered.
ReactionWeights reaction_weights(const SimplicialMesh& mesh, const DualMesh& dual,
                                 const RegionSet& region, const CoefficientSplit& split,
                                 const IntegrationSettings& settings = {});

/// Q(u, v) = Σ_i u_i v_i w_i.
double apply_Q(const ReactionWeights& weights, std::span<const double> u, std::span<const double> v);

/// Σ_i f_i |V_i|.
double mass_lump(const DualMesh& dual, std::span<const double> f);

/// E_T = ∫_T λ u_h v_h 1_K dx - Σ_{x_i ∈ T} u_i v_i λ₁(x_i) ∫_{V_i ∩ T} λ₂ 1_K dx.
///
/// The first term comes from the adaptive integrator at `oracle_tol`. The
/// second uses exact areas for lumping and the adaptive integrator for
/// averaging. Two-dimensional meshes only.
double local_error(const SimplicialMesh& mesh, const DualMesh& dual, Index element,
                   const RegionSet& region, const CoefficientSplit& split,
                   std::span<const double> u, std::span<const double> v, double oracle_tol);

}  // namespace voxquad
