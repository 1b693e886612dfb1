// voxquad: convergence studies for reaction-drift-diffusion with a
// discontinuous reaction coefficient.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxquad/assembly.hpp"
#include "voxquad/error.hpp"
#include "voxquad/radial.hpp"
#include "voxquad/studies.hpp"

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitSolverFailure = 3;

struct Options {
  voxquad::StudyConfig config;
  std::string out;
  std::string method = "both";
  std::string integrator = "mc";
  std::string mesh;
  std::string inject;
  int dim = 2;
  std::size_t radial_elements = 10000;
  bool quiet = false;
};

void add_model_flags(CLI::App* app, Options& o) {
  app->add_option("--lambda-bar", o.config.lambda_bar, "Reaction scale lambda_bar")->capture_default_str();
  app->add_option("--kappa-bar", o.config.kappa_bar, "Potential psi = kappa_bar |x|^2")->capture_default_str();
  app->add_option("--rstar", o.config.rstar, "Radius of the reactive ball K")->capture_default_str();
}

void add_study_flags(CLI::App* app, Options& o) {
  add_model_flags(app, o);
  app->add_option("--rings", o.config.rings, "Comma-separated ring counts of the disk meshes")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--method", o.method, "Coefficient split")
      ->check(CLI::IsMember({"lump", "average", "both"}))
      ->capture_default_str();
  app->add_option("--mc-seed", o.config.integration.seed, "Seed of the Monte Carlo streams")->capture_default_str();
  app->add_option("--mc-samples-per-h2", o.config.integration.samples_per_h2,
                  "Monte Carlo samples per voxel or element are floor(value / h^2)")
      ->capture_default_str();
  app->add_option("--integrator", o.integrator, "Voxel integrals of non-constant weights")
      ->check(CLI::IsMember({"mc", "adaptive"}))
      ->capture_default_str();
  app->add_option("--oracle-tol", o.config.integration.oracle_tol, "Tolerance of the adaptive integrator")
      ->capture_default_str();
  app->add_option("--tol", o.config.solver.tol, "Relative residual tolerance")->capture_default_str();
  app->add_option("--max-iter", o.config.solver.max_iter, "Iteration cap (0: 10 n)")->capture_default_str();
  app->add_option("--out", o.out, "CSV output path (default: stdout)");
  app->add_option("--dump-matrix", o.config.dump_matrix, "Write the finest system matrix as 'row col value'");
  app->add_option("--radial-elements", o.config.radial_elements, "Elements of the radial reference")
      ->capture_default_str();
  app->add_flag("--quiet", o.quiet, "No progress output");
}

voxquad::MethodChoice method_of(const std::string& s) {
  if (s == "lump") return voxquad::MethodChoice::Lump;
  if (s == "average") return voxquad::MethodChoice::Average;
  return voxquad::MethodChoice::Both;
}

void finalize(Options& o) {
  o.config.method = method_of(o.method);
  o.config.integration.integrator =
      o.integrator == "adaptive" ? voxquad::Integrator::Adaptive : voxquad::Integrator::MonteCarlo;
  if (!o.quiet) o.config.log = &std::cerr;
}

template <class Write>
void emit(const std::string& path, Write&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw voxquad::Error("cannot open " + path + " for writing");
  write(f);
}

void print_rates(const voxquad::StudyReport& report) {
  for (std::size_t c = 1; c < report.columns.size(); ++c) {
    std::fprintf(stderr, "rate %-20s all rows %7.4f   finest half %7.4f\n", report.columns[c].c_str(),
                 report.rates[c - 1], report.finest_half_rates[c - 1]);
  }
  std::fprintf(stderr, "wall time %.2f s\n", report.wall_seconds);
}

int run_study(Options& o, voxquad::StudyReport (*study)(const voxquad::StudyConfig&)) {
  finalize(o);
  const voxquad::StudyReport report = study(o.config);
  emit(o.out, [&](std::ostream& s) { report.write_csv(s); });
  print_rates(report);
  return 0;
}

int run_verify(const Options& o) {
  voxquad::VerifyFaults faults;
  faults.flip_bernoulli = o.inject == "bernoulli-sign";
  faults.corrupt_voxel = o.inject == "voxel";
  const auto checks = voxquad::run_verify(faults);
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%s %-30s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? 0 : kExitCheckFailure;
}

int run_reference(Options& o) {
  const voxquad::RadialSolution sol = voxquad::solve_radial(o.dim, o.config.lambda_bar, o.config.kappa_bar,
                                                            o.config.rstar, o.radial_elements);
  emit(o.out, [&](std::ostream& s) {
    char buf[64];
    s << "r,u\n";
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sol.r[i], sol.u[i]);
      s << buf;
    }
  });
  return 0;
}

int run_solve(Options& o) {
  finalize(o);
  voxquad::SimplicialMesh mesh =
      o.mesh.empty() ? voxquad::generate_disk_mesh(o.config.rings.front()) : voxquad::load_mesh(o.mesh);
  if (mesh.dim() != 2) throw voxquad::InvalidArgument("solve needs a two-dimensional mesh");
  const voxquad::SplitMode mode =
      o.config.method == voxquad::MethodChoice::Average ? voxquad::SplitMode::Averaging : voxquad::SplitMode::Lumping;
  const voxquad::DiskSolution sol = voxquad::solve_disk_problem(std::move(mesh), o.config, mode);
  emit(o.out, [&](std::ostream& s) {
    char buf[128];
    s << "x,y,u,reference\n";
    for (voxquad::Index i = 0; i < sol.mesh.num_nodes(); ++i) {
      const voxquad::Point p = sol.mesh.node(i);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x, p.y, sol.u[i], sol.reference[i]);
      s << buf;
    }
  });
  std::fprintf(stderr, "h %.6g  relative L2 error %.6e  (%s, %zu iterations, residual %.2e)\n",
               voxquad::mesh_size(sol.mesh), voxquad::discrete_l2_relative_error(sol.dual, sol.u, sol.reference),
               voxquad::to_string(sol.solve.method).c_str(), sol.solve.iterations, sol.solve.residual);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-drift-diffusion with a discontinuous reaction coefficient"};
  app.require_subcommand(1);
  Options o;

  auto* convergence = app.add_subcommand("convergence", "L2 error against the radial reference");
  add_study_flags(convergence, o);
  auto* superclose = app.add_subcommand("supercloseness", "Quadrature vs Galerkin reaction, psi = 0");
  add_study_flags(superclose, o);
  auto* local = app.add_subcommand("local-orders", "Local quadrature error per element class");
  add_study_flags(local, o);
  auto* verify = app.add_subcommand("verify", "Exact identities and monotonicity checks");
  verify->add_option("--inject", o.inject, "Negative control")->check(CLI::IsMember({"bernoulli-sign", "voxel"}));
  auto* reference = app.add_subcommand("reference", "Radial reference solution as r,u CSV");
  add_model_flags(reference, o);
  reference->add_option("--dim", o.dim, "Ambient dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
  reference->add_option("--n-elements", o.radial_elements, "Radial elements")->capture_default_str();
  reference->add_option("--out", o.out, "CSV output path (default: stdout)");
  auto* solve = app.add_subcommand("solve", "Solve once on a disk mesh (first --rings value) or --mesh file");
  add_study_flags(solve, o);
  solve->add_option("--mesh", o.mesh, "Mesh file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadConfig;
  }

  try {
    if (*convergence) return run_study(o, voxquad::run_convergence);
    if (*superclose) return run_study(o, voxquad::run_supercloseness);
    if (*local) return run_study(o, voxquad::run_local_orders);
    if (*verify) return run_verify(o);
    if (*reference) return run_reference(o);
    if (*solve) return run_solve(o);
  } catch (const voxquad::ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolverFailure;
  } catch (const voxquad::InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheckFailure;
  }
  return kExitBadConfig;
}
