#include "voxquad/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "voxquad/error.hpp"
#include "voxquad/mesh.hpp"

namespace voxquad {

RadialSolution solve_radial(int dim, double lambda_bar, double kappa_bar, double rstar,
                            std::size_t n_elements) {
  if (dim != 2 && dim != 3) throw InvalidArgument("radial dimension must be 2 or 3");
  if (!(lambda_bar > 0.0)) throw InvalidArgument("lambda_bar must be positive");
  if (!(rstar > 0.0)) throw InvalidArgument("rstar must be positive");
  if (!std::isfinite(kappa_bar)) throw InvalidArgument("kappa_bar must be finite");

  std::vector<double> pins;
  if (rstar < 1.0) pins.push_back(rstar);
  const SimplicialMesh mesh = generate_interval_mesh(n_elements, 0.0, 1.0, pins);

  RadialSolution sol;
  sol.dim = dim;
  sol.lambda_bar = lambda_bar;
  sol.kappa_bar = kappa_bar;
  sol.rstar = rstar;
  const std::size_t n = mesh.num_nodes();
  sol.r.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.r[i] = mesh.node(i).x;

  static constexpr std::array<double, 3> kNodes = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> kWeights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  // Tridiagonal system: lower[i] u_{i-1} + diag[i] u_i + upper[i] u_{i+1} = rhs[i].
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double r0 = sol.r[e];
    const double r1 = sol.r[e + 1];
    const double h = r1 - r0;
    const bool reactive = rstar >= 1.0 || r1 <= rstar;
    std::array<std::array<double, 2>, 2> k{};
    std::array<double, 2> f{};
    const std::array<double, 2> dphi{-1.0 / h, 1.0 / h};
    for (std::size_t q = 0; q < 3; ++q) {
      const double r = 0.5 * (r0 + r1) + 0.5 * h * kNodes[q];
      const double w = 0.5 * h * kWeights[q] * std::pow(r, dim - 1);
      const std::array<double, 2> phi{(r1 - r) / h, (r - r0) / h};
      const double dpsi = 2.0 * kappa_bar * r;
      const double react = reactive ? lambda_bar * std::exp(-kappa_bar * r * r) : 0.0;
      for (std::size_t a = 0; a < 2; ++a) {
        f[a] += w * phi[a];
        for (std::size_t b = 0; b < 2; ++b) {
          k[a][b] += w * ((dphi[b] + phi[b] * dpsi) * dphi[a] + react * phi[b] * phi[a]);
        }
      }
    }
    diag[e] += k[0][0];
    upper[e] += k[0][1];
    lower[e + 1] += k[1][0];
    diag[e + 1] += k[1][1];
    rhs[e] += f[0];
    rhs[e + 1] += f[1];
  }

  // Thomas algorithm.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  c[0] = upper[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * c[i - 1];
    if (m == 0.0 || !std::isfinite(m)) throw ConvergenceError("radial system is singular", m);
    c[i] = upper[i] / m;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
  }
  sol.u.resize(n);
  sol.u[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) sol.u[i] = d[i] - c[i] * sol.u[i + 1];
  return sol;
}

double eval_radial(const RadialSolution& solution, double r) {
  constexpr double kSlack = 1e-12;
  const auto& nodes = solution.r;
  if (nodes.size() < 2) throw InvalidArgument("radial solution is empty");
  if (r < nodes.front() - kSlack || r > nodes.back() + kSlack) {
    throw InvalidArgument("radius outside [0, 1]");
  }
  r = std::clamp(r, nodes.front(), nodes.back());
  auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
  std::size_t k = it == nodes.end() ? nodes.size() - 1 : static_cast<std::size_t>(it - nodes.begin());
  k = std::max<std::size_t>(k, 1);
  const double r0 = nodes[k - 1], r1 = nodes[k];
  const double t = (r - r0) / (r1 - r0);
  return (1.0 - t) * solution.u[k - 1] + t * solution.u[k];
}

}  // namespace voxquad
