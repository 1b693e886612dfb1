#include "voxquad/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "voxquad/assembly.hpp"
#include "voxquad/error.hpp"
#include "voxquad/radial.hpp"

namespace voxquad {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<SplitMode> modes_of(MethodChoice choice) {
  switch (choice) {
    case MethodChoice::Lump:
      return {SplitMode::Lumping};
    case MethodChoice::Average:
      return {SplitMode::Averaging};
    case MethodChoice::Both:
      break;
  }
  return {SplitMode::Lumping, SplitMode::Averaging};
}

std::string column_name(SplitMode mode) { return mode == SplitMode::Lumping ? "lump" : "integrate"; }

double rate_or_nan(std::span<const double> hs, std::span<const double> errs) {
  if (hs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0) || !(errs[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  }
  return estimate_rate(hs, errs);
}

void finish(StudyReport& report, Clock::time_point start) {
  const std::size_t rows = report.rows.size();
  std::vector<double> hs(rows);
  for (std::size_t r = 0; r < rows; ++r) hs[r] = report.rows[r][0];
  // Rows are ordered by increasing ring count, so the finest rows come last.
  const std::size_t half = std::min(rows, std::max<std::size_t>(2, (rows + 1) / 2));
  for (std::size_t c = 1; c < report.columns.size(); ++c) {
    std::vector<double> errs(rows);
    for (std::size_t r = 0; r < rows; ++r) errs[r] = report.rows[r][c];
    report.rates.push_back(rate_or_nan(hs, errs));
    report.finest_half_rates.push_back(rate_or_nan(std::span(hs).last(half), std::span(errs).last(half)));
  }
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

void say(const StudyConfig& config, const std::string& message) {
  if (config.log) *config.log << message << std::endl;
}

std::string format_h(double h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", h);
  return buf;
}

std::vector<double> nodal(const SimplicialMesh& mesh, const ScalarField& f) {
  std::vector<double> v(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) v[i] = f(mesh.node(i));
  return v;
}

std::vector<double> solve_or_report(const LinearSystem& system, const SolveOptions& options,
                                    double h, SolveReport* report) {
  try {
    return solve(system, options, report);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(e.what()) + " at h = " + format_h(h), e.best_residual());
  }
}

}  // namespace

void StudyConfig::validate() const {
  if (!(lambda_bar > 0.0)) throw InvalidArgument("--lambda-bar must be positive");
  if (!std::isfinite(kappa_bar) || kappa_bar < 0.0) throw InvalidArgument("--kappa-bar must be >= 0");
  if (!(rstar > 0.0)) throw InvalidArgument("--rstar must be positive");
  if (rings.empty()) throw InvalidArgument("--rings must not be empty");
  for (std::size_t k = 0; k < rings.size(); ++k) {
    if (rings[k] == 0) throw InvalidArgument("--rings entries must be positive");
    if (k > 0 && rings[k] <= rings[k - 1]) throw InvalidArgument("--rings must be strictly increasing");
  }
  if (!(solver.tol > 0.0)) throw InvalidArgument("--tol must be positive");
  if (!(integration.samples_per_h2 > 0.0)) throw InvalidArgument("--mc-samples-per-h2 must be positive");
  if (!(integration.oracle_tol > 0.0)) throw InvalidArgument("--oracle-tol must be positive");
  if (radial_elements < 2) throw InvalidArgument("radial reference needs at least 2 elements");
}

std::size_t StudyReport::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> StudyReport::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> v;
  for (const auto& row : rows) v.push_back(row[c]);
  return v;
}

double StudyReport::rate(const std::string& name) const {
  const std::size_t c = column(name);
  if (c == 0) throw InvalidArgument("h has no rate");
  return rates.at(c - 1);
}

double StudyReport::finest_half_rate(const std::string& name) const {
  const std::size_t c = column(name);
  if (c == 0) throw InvalidArgument("h has no rate");
  return finest_half_rates.at(c - 1);
}

void StudyReport::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

void StudyReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_csv(out);
}

double estimate_rate(std::span<const double> hs, std::span<const double> errs) {
  if (hs.size() != errs.size()) throw InvalidArgument("rate estimate needs matching lengths");
  if (hs.size() < 2) throw InvalidArgument("rate estimate needs at least two points");
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0) || !(errs[i] > 0.0)) throw InvalidArgument("rate estimate needs positive inputs");
    mx += std::log(hs[i]);
    my += std::log(errs[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double dx = std::log(hs[i]) - mx;
    sxy += dx * (std::log(errs[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw InvalidArgument("rate estimate needs distinct h values");
  return sxy / sxx;
}

DiskSolution solve_disk_problem(SimplicialMesh mesh, const StudyConfig& config, SplitMode mode) {
  DiskSolution out{std::move(mesh), {}, {}, {}, {}};
  const SimplicialMesh& m = out.mesh;
  out.dual = barycentric_dual(m);
  const double kappa = config.kappa_bar;
  const ScalarField psi = [kappa](Point x) { return kappa * dot(x, x); };
  const RegionSet region = RegionSet::ball(Point{}, config.rstar);
  const SparseOperator a = assemble_eafe(m, nodal(m, psi));
  const CoefficientSplit split{mode, exponential_reaction(config.lambda_bar, psi)};
  const ReactionWeights w = reaction_weights(m, out.dual, region, split, config.integration);
  const LinearSystem system = make_system(a + assemble_reaction_diagonal(w), assemble_load(out.dual));
  if (!config.dump_matrix.empty()) system.matrix.write_coordinate(config.dump_matrix);
  out.u = solve_or_report(system, config.solver, mesh_size(m), &out.solve);

  const RadialSolution ref =
      solve_radial(2, config.lambda_bar, config.kappa_bar, config.rstar, config.radial_elements);
  out.reference.resize(m.num_nodes());
  for (Index i = 0; i < m.num_nodes(); ++i) out.reference[i] = eval_radial(ref, norm(m.node(i)));
  return out;
}

StudyReport run_convergence(const StudyConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const auto modes = modes_of(config.method);
  StudyReport report;
  report.columns.push_back("h");
  for (SplitMode mode : modes) report.columns.push_back(column_name(mode));

  const RadialSolution ref =
      solve_radial(2, config.lambda_bar, config.kappa_bar, config.rstar, config.radial_elements);
  const double kappa = config.kappa_bar;
  const ScalarField psi = [kappa](Point x) { return kappa * dot(x, x); };
  const RegionSet region = RegionSet::ball(Point{}, config.rstar);

  for (std::size_t k = 0; k < config.rings.size(); ++k) {
    const SimplicialMesh mesh = generate_disk_mesh(config.rings[k]);
    const DualMesh dual = barycentric_dual(mesh);
    const double h = mesh_size(mesh);
    const SparseOperator a = assemble_eafe(mesh, nodal(mesh, psi));
    const std::vector<double> load = assemble_load(dual);
    std::vector<double> reference(mesh.num_nodes());
    for (Index i = 0; i < mesh.num_nodes(); ++i) reference[i] = eval_radial(ref, norm(mesh.node(i)));

    std::vector<double> row{h};
    for (SplitMode mode : modes) {
      const CoefficientSplit split{mode, exponential_reaction(config.lambda_bar, psi)};
      const ReactionWeights w = reaction_weights(mesh, dual, region, split, config.integration);
      const LinearSystem system = make_system(a + assemble_reaction_diagonal(w), load);
      if (k + 1 == config.rings.size() && mode == modes.front() && !config.dump_matrix.empty()) {
        system.matrix.write_coordinate(config.dump_matrix);
      }
      SolveReport sr;
      const std::vector<double> u = solve_or_report(system, config.solver, h, &sr);
      const double err = discrete_l2_relative_error(dual, u, reference);
      row.push_back(err);
      say(config, "rings " + std::to_string(config.rings[k]) + " h " + format_h(h) + " " +
                      column_name(mode) + " error " + format_h(err) + " (" + to_string(sr.method) +
                      ", " + std::to_string(sr.iterations) + " it)");
    }
    report.rows.push_back(std::move(row));
  }
  finish(report, start);
  return report;
}

StudyReport run_supercloseness(const StudyConfig& config) {
  config.validate();
  const auto start = Clock::now();
  StudyReport report;
  report.columns = {"h", "L2", "H1"};
  const RegionSet region = RegionSet::ball(Point{}, config.rstar);
  const double lambda_bar = config.lambda_bar;
  const ScalarField lambda = [lambda_bar](Point) { return lambda_bar; };
  const SplitMode mode =
      config.method == MethodChoice::Average ? SplitMode::Averaging : SplitMode::Lumping;

  for (std::size_t k = 0; k < config.rings.size(); ++k) {
    const SimplicialMesh mesh = generate_disk_mesh(config.rings[k]);
    const DualMesh dual = barycentric_dual(mesh);
    const double h = mesh_size(mesh);
    const SparseOperator s = assemble_p1_stiffness(mesh);
    const std::vector<double> load = assemble_load(dual);

    const ReactionWeights w = reaction_weights(mesh, dual, region, {mode, lambda}, config.integration);
    const LinearSystem quad = make_system(s + assemble_reaction_diagonal(w), load);
    const SparseOperator r_gal = assemble_galerkin_reaction(mesh, region, lambda, config.integration);
    const LinearSystem galerkin = make_system(s + r_gal, load);
    if (k + 1 == config.rings.size() && !config.dump_matrix.empty()) {
      quad.matrix.write_coordinate(config.dump_matrix);
    }
    const std::vector<double> u = solve_or_report(quad, config.solver, h, nullptr);
    const std::vector<double> ug = solve_or_report(galerkin, config.solver, h, nullptr);
    std::vector<double> diff(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) diff[i] = u[i] - ug[i];
    const double l2 = discrete_l2_norm(dual, diff);
    const double h1 = h1_seminorm_diff(s, u, ug);
    report.rows.push_back({h, l2, h1});
    say(config, "rings " + std::to_string(config.rings[k]) + " h " + format_h(h) + " L2 " +
                    format_h(l2) + " H1 " + format_h(h1));
  }
  finish(report, start);
  return report;
}

StudyReport run_local_orders(const StudyConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const auto modes = modes_of(config.method);
  StudyReport report;
  report.columns.push_back("h");
  for (SplitMode mode : modes) {
    report.columns.push_back(column_name(mode) + "_interior");
    report.columns.push_back(column_name(mode) + "_interface");
  }
  report.columns.push_back("interface_count");

  const RegionSet region = RegionSet::ball(Point{}, config.rstar);
  const double kappa = config.kappa_bar;
  const ScalarField psi = [kappa](Point x) { return kappa * dot(x, x); };
  const ScalarField smooth = [](Point x) { return std::exp(-dot(x, x)); };

  for (std::size_t k = 0; k < config.rings.size(); ++k) {
    const SimplicialMesh mesh = generate_disk_mesh(config.rings[k]);
    const DualMesh dual = barycentric_dual(mesh);
    const double h = mesh_size(mesh);
    const ElementClassification tags = classify_elements(mesh, region);
    const std::vector<double> u = nodal(mesh, smooth);
    std::vector<double> row{h};
    for (SplitMode mode : modes) {
      const CoefficientSplit split{mode, exponential_reaction(config.lambda_bar, psi)};
      double interior = 0.0, interface = 0.0;
      for (Index e = 0; e < mesh.num_elements(); ++e) {
        if (tags.tags[e] == ElementTag::Exterior) continue;
        const double measure = element_geometry(mesh, e).measure;
        const double err =
            std::abs(local_error(mesh, dual, e, region, split, u, u, config.integration.oracle_tol)) /
            measure;
        double& slot = tags.tags[e] == ElementTag::Interior ? interior : interface;
        slot = std::max(slot, err);
      }
      row.push_back(interior);
      row.push_back(interface);
    }
    row.push_back(static_cast<double>(tags.count(ElementTag::Interface)));
    say(config, "rings " + std::to_string(config.rings[k]) + " h " + format_h(h) + " interface elements " +
                    std::to_string(tags.count(ElementTag::Interface)));
    report.rows.push_back(std::move(row));
  }
  finish(report, start);
  return report;
}

}  // namespace voxquad
