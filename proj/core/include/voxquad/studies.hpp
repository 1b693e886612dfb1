#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "voxquad/quadrature.hpp"
#include "voxquad/solver.hpp"

namespace voxquad {

enum class MethodChoice { Lump, Average, Both };

struct StudyConfig {
  double lambda_bar = 5.0;
  double kappa_bar = 1.0;
  double rstar = std::numbers::pi / 5.0;
  /// Strictly increasing ring counts of the disk meshes.
  std::vector<std::size_t> rings{4, 8, 16, 32, 64};
  MethodChoice method = MethodChoice::Both;
  IntegrationSettings integration;
  SolveOptions solver;
  std::size_t radial_elements = 10000;
  /// Coordinate dump of the finest system matrix; empty for none.
  std::filesystem::path dump_matrix;
  /// Progress messages; null for silence.
  std::ostream* log = nullptr;

  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
};

struct StudyReport {
  /// columns[0] is "h".
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Least-squares rate per non-h column over all rows; NaN when undefined.
  std::vector<double> rates;
  /// Same over the finest ⌈rows/2⌉ rows (at least two).
  std::vector<double> finest_half_rates;
  double wall_seconds = 0.0;

  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
  double rate(const std::string& name) const;
  double finest_half_rate(const std::string& name) const;

  /// Header then one row per h, reals with 17 significant digits.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
};

/// Disk problem with ψ = κ̄|x|² against the radial reference; columns
/// h and `lump` and/or `integrate`.
StudyReport run_convergence(const StudyConfig& config);

/// ψ ≡ 0: quadrature solution vs Galerkin-reaction solution; columns h, L2, H1.
StudyReport run_supercloseness(const StudyConfig& config);

/// Max |E_T|/|T| over interior and interface elements for u = v = I_h e^{-|x|²};
/// columns h, <method>_interior, <method>_interface, interface_count.
StudyReport run_local_orders(const StudyConfig& config);

/// Ordinary least-squares slope of log(err) against log(h).
double estimate_rate(std::span<const double> hs, std::span<const double> errs);

/// Solution of the disk problem on one mesh: x, y, u, and the radial reference.
struct DiskSolution {
  SimplicialMesh mesh;
  DualMesh dual;
  std::vector<double> u;
  std::vector<double> reference;
  SolveReport solve;
};

/// Builds and solves (A + R) u = f_h on `mesh` for one split mode.
DiskSolution solve_disk_problem(SimplicialMesh mesh, const StudyConfig& config, SplitMode mode);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Deliberate faults for negative controls of the verification suite.
struct VerifyFaults {
  bool flip_bernoulli = false;
  bool corrupt_voxel = false;
};

std::vector<VerifyCheck> run_verify(const VerifyFaults& faults = {});

}  // namespace voxquad
