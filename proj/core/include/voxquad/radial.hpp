#pragma once

#include <cstddef>
#include <vector>

namespace voxquad {

/// P1 solution of the radially symmetric model problem on [0, 1]:
///
///   -(1/r^{d-1}) (r^{d-1} (u' + u ψ'))' + λ̄ e^{-ψ} u 1_{r<r*} = 1,  ψ = κ̄ r²,
///
/// with zero-flux conditions at both ends.
struct RadialSolution {
  int dim = 2;
  double lambda_bar = 0.0;
  double kappa_bar = 0.0;
  double rstar = 0.0;
  /// Sorted nodes; r* is one of them when r* < 1.
  std::vector<double> r;
  std::vector<double> u;
};

/// Weighted weak form with three-point Gauss integration per element and a
/// tridiagonal solve. Requires d ∈ {2, 3}, λ̄ > 0 and r* > 0; r* ≥ 1 puts the
/// whole ball in K.
RadialSolution solve_radial(int dim, double lambda_bar, double kappa_bar, double rstar,
                            std::size_t n_elements = 10000);

/// Linear interpolation; r may exceed [0, 1] by at most 1e-12.
double eval_radial(const RadialSolution& solution, double r);

}  // namespace voxquad
