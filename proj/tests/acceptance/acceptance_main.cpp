// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "voxquad/assembly.hpp"
#include "voxquad/error.hpp"
#include "voxquad/random.hpp"
#include "voxquad/studies.hpp"

using namespace voxquad;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  int id;
  bool passed;
  std::string summary;
};

std::vector<Verdict> verdicts;

void record(int id, bool passed, std::string summary) {
  std::printf("criterion %d: %s  %s\n\n", id, passed ? "PASS" : "FAIL", summary.c_str());
  std::fflush(stdout);
  verdicts.push_back({id, passed, std::move(summary)});
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

template <typename... Args>
std::string fmt(const char* format, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

void print_report(const StudyReport& r) {
  std::printf("   ");
  for (const auto& c : r.columns) std::printf(" %14s", c.c_str());
  std::printf("\n");
  for (const auto& row : r.rows) {
    std::printf("   ");
    for (double v : row) std::printf(" %14.6e", v);
    std::printf("\n");
  }
  for (std::size_t k = 1; k < r.columns.size(); ++k) {
    std::printf("    rate %-18s all rows %7.4f   finest half %7.4f\n", r.columns[k].c_str(),
                r.rates[k - 1], r.finest_half_rates[k - 1]);
  }
}

std::vector<double> radial_psi(const SimplicialMesh& mesh, double kappa) {
  std::vector<double> psi(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) psi[i] = kappa * dot(mesh.node(i), mesh.node(i));
  return psi;
}

const double kRstar = std::numbers::pi / 5.0;

std::vector<std::size_t> all_disk_rings() {
  std::vector<std::size_t> rings;
  for (std::size_t r = 1; r <= 12; ++r) rings.push_back(r);
  for (std::size_t r : {16, 24, 32, 64}) rings.push_back(r);
  return rings;
}

std::vector<SimplicialMesh> all_interval_meshes() {
  const double pins[] = {kRstar};
  std::vector<SimplicialMesh> meshes;
  for (std::size_t n : {1, 2, 7, 64, 499}) meshes.push_back(generate_interval_mesh(n, 0.0, 1.0));
  for (std::size_t n : {10, 40, 1000}) meshes.push_back(generate_interval_mesh(n, 0.0, 1.0, pins));
  return meshes;
}

// ---------------------------------------------------------------------------

StudyConfig study_config(double kappa_bar) {
  StudyConfig c;
  c.lambda_bar = 5.0;
  c.kappa_bar = kappa_bar;
  c.rstar = kRstar;
  c.rings = {4, 8, 16, 32, 64};
  c.method = MethodChoice::Both;
  c.integration.integrator = Integrator::Adaptive;
  c.integration.oracle_tol = 1e-10;
  return c;
}

StudyReport convergence_kappa1;

void criterion_1() {
  std::printf("[1] convergence, lambda_bar=5, kappa_bar=1, r*=pi/5, rings 4..64\n");
  const auto start = Clock::now();
  convergence_kappa1 = run_convergence(study_config(1.0));
  const double elapsed = seconds_since(start);
  print_report(convergence_kappa1);
  const StudyReport& r = convergence_kappa1;
  const double lump = r.rate("lump"), avg = r.rate("integrate");
  const double fine = std::max(r.rows.back()[r.column("lump")], r.rows.back()[r.column("integrate")]);
  std::printf("    runtime %.1f s\n", elapsed);
  const bool ok = in_band(lump, 1.8, 2.2) && in_band(avg, 1.8, 2.2) && fine <= 5e-4 && elapsed <= 300.0;
  record(1, ok,
         fmt("rates lump %.3f averaging %.3f in [1.8, 2.2]; finest error %.2e <= 5e-4; ", lump, avg, fine) +
             fmt("runtime %.1f s <= 300 s", elapsed));
}

void criterion_2() {
  std::printf("[2] convergence, kappa_bar=5\n");
  const auto start = Clock::now();
  const StudyReport r = run_convergence(study_config(5.0));
  const double elapsed = seconds_since(start);
  print_report(r);
  const double lump = r.rate("lump"), avg = r.rate("integrate");
  bool larger = r.rows.size() == convergence_kappa1.rows.size();
  for (std::size_t i = 0; larger && i < r.rows.size(); ++i) {
    for (std::size_t k = 1; k < r.columns.size(); ++k) larger = larger && r.rows[i][k] > convergence_kappa1.rows[i][k];
  }
  const double fine = std::max(r.rows.back()[r.column("lump")], r.rows.back()[r.column("integrate")]);
  std::printf("    runtime %.1f s, errors above kappa_bar=1 at every h: %s\n", elapsed, larger ? "yes" : "no");
  const bool ok = in_band(lump, 1.8, 2.2) && in_band(avg, 1.8, 2.2) && larger && fine <= 5e-4;
  record(2, ok,
         fmt("rates lump %.3f averaging %.3f in [1.8, 2.2]; finest error %.2e <= 5e-4; ", lump, avg, fine) +
             "errors larger than kappa_bar=1 at every h: " + (larger ? "yes" : "no"));
}

void criterion_3() {
  std::printf("[3] supercloseness, psi=0, Monte Carlo Galerkin interface assembly, 3 seeds\n");
  bool ok = true;
  double l2_lo = 1e300, l2_hi = -1e300, h1_lo = 1e300, h1_hi = -1e300;
  for (std::uint64_t s = 0; s < 3; ++s) {
    StudyConfig c = study_config(0.0);
    c.method = MethodChoice::Lump;
    c.integration.integrator = Integrator::MonteCarlo;
    c.integration.seed = IntegrationSettings{}.seed + s;
    const auto start = Clock::now();
    const StudyReport r = run_supercloseness(c);
    std::printf("    seed %llu (%.1f s)\n", static_cast<unsigned long long>(c.integration.seed), seconds_since(start));
    print_report(r);
    const double l2 = r.rate("L2"), h1 = r.rate("H1");
    l2_lo = std::min(l2_lo, l2);
    l2_hi = std::max(l2_hi, l2);
    h1_lo = std::min(h1_lo, h1);
    h1_hi = std::max(h1_hi, h1);
    ok = ok && in_band(l2, 1.8, 2.2) && in_band(h1, 1.3, 1.8);
  }
  record(3, ok,
         fmt("L2 rate over seeds [%.3f, %.3f] in [1.8, 2.2]; ", l2_lo, l2_hi) +
             fmt("H1 rate over seeds [%.3f, %.3f] in [1.3, 1.8]", h1_lo, h1_hi));
}

void criterion_4() {
  std::printf("[4] local quadrature error orders, oracle tol 1e-10\n");
  const StudyReport r = run_local_orders(study_config(1.0));
  print_report(r);
  bool ok = true;
  std::string summary;
  for (const char* m : {"lump", "integrate"}) {
    const double interior = r.rate(std::string(m) + "_interior");
    const double interface = r.rate(std::string(m) + "_interface");
    ok = ok && in_band(interior, 1.7, 2.3) && in_band(interface, 0.7, 1.3);
    summary += m + fmt(" interior %.3f in [1.7, 2.3], interface %.3f in [0.7, 1.3]; ", interior, interface);
  }
  // Linear in rings means count ∝ 1/h.
  const double count_rate = r.rate("interface_count");
  const bool linear = in_band(count_rate, -1.15, -0.85);
  ok = ok && linear;
  summary += fmt("interface count rate in h %.3f in [-1.15, -0.85]", count_rate);
  record(4, ok, summary);
}

// ---------------------------------------------------------------------------

double max_entry_difference(const SparseOperator& a, const SparseOperator& b) {
  double worst = 0.0;
  for (const Triplet& t : a.triplets()) worst = std::max(worst, std::abs(t.value - b.at(t.row, t.col)));
  for (const Triplet& t : b.triplets()) worst = std::max(worst, std::abs(t.value - a.at(t.row, t.col)));
  return worst;
}

void criterion_5() {
  std::printf("[5] exact identities\n");
  const auto start = Clock::now();
  std::vector<SimplicialMesh> meshes;
  for (std::size_t r : all_disk_rings()) meshes.push_back(generate_disk_mesh(r));
  for (SimplicialMesh& m : all_interval_meshes()) meshes.push_back(std::move(m));

  double dual_dev = 0.0, lump_dev = 0.0, eafe0 = 0.0, column_sum = 0.0, constant = 0.0;
  std::size_t incidence = 0;
  for (const SimplicialMesh& mesh : meshes) {
    const DualMesh dual = barycentric_dual(mesh);
    const DualIdentityReport r = verify_dual_identities(mesh, dual);
    dual_dev = std::max(dual_dev, r.max_deviation());
    incidence += r.incidence_errors;

    std::vector<double> f(mesh.num_nodes());
    for (Index i = 0; i < mesh.num_nodes(); ++i) f[i] = 1.0 + 2.0 * mesh.node(i).x - 0.5 * mesh.node(i).y;
    double exact = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      const auto idx = mesh.element(e);
      double mean = 0.0;
      for (Index i : idx) mean += f[i];
      exact += element_geometry(mesh, e).measure * mean / static_cast<double>(idx.size());
    }
    lump_dev = std::max(lump_dev, std::abs(mass_lump(dual, f) - exact) / std::abs(exact));

    const SparseOperator s = assemble_p1_stiffness(mesh);
    eafe0 = std::max(eafe0, max_entry_difference(assemble_eafe(mesh, std::vector<double>(mesh.num_nodes(), 0.0)), s));

    for (double kappa : {1.0, 5.0}) {
      const SparseOperator a = assemble_eafe(mesh, radial_psi(mesh, kappa));
      for (double c : a.column_sums()) column_sum = std::max(column_sum, std::abs(c) / a.max_abs());
    }

    if (mesh.dim() == 2 && mesh.num_nodes() <= 20000) {
      const SparseOperator a = assemble_eafe(mesh, std::vector<double>(mesh.num_nodes(), 0.0));
      const ReactionWeights w =
          reaction_weights(mesh, dual, RegionSet::ball({0, 0}, 2.0), {SplitMode::Lumping, [](Point) { return 5.0; }});
      const std::vector<double> u = solve(make_system(a + assemble_reaction_diagonal(w), assemble_load(dual)), {});
      for (double v : u) constant = std::max(constant, std::abs(v - 0.2));
    }
  }

  // Tensor-product meshes: identities and exactness on bilinear fields.
  for (auto [n1, n2] : {std::pair{3, 5}, std::pair{4, 4}, std::pair{9, 12}}) {
    const TensorMesh tm =
        tensor_product_mesh({generate_interval_mesh(n1, 0.0, 1.0), generate_interval_mesh(n2, -1.0, 1.0)});
    const DualMesh parts[] = {barycentric_dual(tm.component(0)), barycentric_dual(tm.component(1))};
    const DualMesh d = tensor_dual(tm, parts);
    const DualIdentityReport r = verify_dual_identities(tm, d);
    dual_dev = std::max(dual_dev, r.max_deviation());
    incidence += r.incidence_errors;
    std::vector<double> f(tm.num_nodes());
    for (Index i = 0; i < tm.num_nodes(); ++i) {
      const auto x = tm.node_coordinates(i);
      f[i] = 2.0 + x[0] - 3.0 * x[1] + 4.0 * x[0] * x[1];
    }
    // ∫_0^1 ∫_-1^1 (2 + x - 3y + 4xy) dy dx = 4 + 1.
    lump_dev = std::max(lump_dev, std::abs(mass_lump(d, f) - 5.0) / 5.0);
  }

  double reflection = 0.0;
  for (int k = -5000; k <= 5000; ++k) {
    const double t = 0.01 * k;
    const double lhs = bernoulli(-t);
    reflection = std::max(reflection, std::abs(lhs - std::exp(t) * bernoulli(t)) / lhs);
  }

  const double elapsed = seconds_since(start);
  std::printf("    dual identities %.2e (incidence errors %zu), mass lump %.2e, EAFE(psi=0) %.2e\n", dual_dev,
              incidence, lump_dev, eafe0);
  std::printf("    Bernoulli reflection %.2e, constant solution %.2e, column sums %.2e, runtime %.1f s\n",
              reflection, constant, column_sum, elapsed);
  const bool ok = dual_dev <= 1e-12 && incidence == 0 && lump_dev <= 1e-12 && eafe0 <= 1e-14 &&
                  reflection <= 1e-13 && constant <= 1e-10 && column_sum <= 1e-12 && elapsed < 30.0;
  record(5, ok,
         fmt("dual %.1e, mass lump %.1e, EAFE(0) %.1e; ", dual_dev, lump_dev, eafe0) +
             fmt("reflection %.1e, constant %.1e, column sums %.1e; ", reflection, constant, column_sum) +
             fmt("runtime %.1f s < 30 s", elapsed));
}

void criterion_6() {
  std::printf("[6] monotonicity\n");
  double offdiag = 0.0, min_inverse = std::numeric_limits<double>::infinity();
  std::size_t inverse_checks = 0;
  bool m_ok = true;
  auto examine = [&](const SimplicialMesh& mesh, const std::vector<double>& psi, const ScalarField& lambda,
                     const RegionSet& k) {
    const SparseOperator a = assemble_eafe(mesh, psi);
    const MMatrixReport sign = check_m_matrix(a, 0);
    offdiag = std::max(offdiag, sign.max_offdiagonal / sign.max_abs);
    if (mesh.num_nodes() > 500) return;
    const DualMesh dual = barycentric_dual(mesh);
    for (SplitMode mode : {SplitMode::Lumping, SplitMode::Averaging}) {
      IntegrationSettings adaptive;
      adaptive.integrator = Integrator::Adaptive;
      const ReactionWeights w = reaction_weights(mesh, dual, k, {mode, lambda}, adaptive);
      const MMatrixReport m = check_m_matrix(a + assemble_reaction_diagonal(w), 500);
      min_inverse = std::min(min_inverse, m.min_inverse_entry);
      m_ok = m_ok && m.inverse_checked && m.passes(1e-13, 1e-12);
      ++inverse_checks;
    }
  };
  for (double kappa : {1.0, 5.0}) {
    const ScalarField lambda = exponential_reaction(5.0, [kappa](Point x) { return kappa * dot(x, x); });
    for (std::size_t r : all_disk_rings()) {
      const SimplicialMesh mesh = generate_disk_mesh(r);
      examine(mesh, radial_psi(mesh, kappa), lambda, RegionSet::ball({0, 0}, kRstar));
    }
    for (const SimplicialMesh& mesh : all_interval_meshes()) {
      examine(mesh, radial_psi(mesh, kappa), lambda, RegionSet::ball({0, 0}, kRstar));
    }
  }
  std::printf("    max off-diagonal/max|A| %.2e, min inverse entry %.2e over %zu systems\n", offdiag, min_inverse,
              inverse_checks);
  record(6, offdiag <= 1e-13 && m_ok,
         fmt("max off-diagonal %.1e <= 1e-13 max|A|; min inverse entry %.1e >= -1e-12", offdiag, min_inverse));
}

void criterion_7() {
  std::printf("[7] tensor-product scheme\n");
  double worst = 0.0, min_u = std::numeric_limits<double>::infinity();
  bool m_ok = true;
  Rng rng(4242);
  for (auto [n1, n2] : {std::pair{3, 5}, std::pair{6, 4}, std::pair{9, 12}, std::pair{13, 13}}) {
    const TensorMesh tm =
        tensor_product_mesh({generate_interval_mesh(n1, 0.0, 1.0), generate_interval_mesh(n2, 0.0, 2.0)});
    std::vector<SparseOperator> ops;
    std::vector<std::vector<double>> masses;
    for (std::size_t j = 0; j < 2; ++j) {
      const SimplicialMesh& c = tm.component(j);
      std::vector<double> psi(c.num_nodes());
      for (Index i = 0; i < c.num_nodes(); ++i) psi[i] = j == 0 ? 1.5 * c.node(i).x : -0.8 * c.node(i).x * c.node(i).x;
      ops.push_back(assemble_eafe(c, psi));
      const DualMesh d = barycentric_dual(c);
      masses.emplace_back(d.voxel_measures().begin(), d.voxel_measures().end());
    }
    const SparseOperator k = kronecker_assemble(tm, ops, masses);

    // Brute force: dense A1 ⊗ M2 + M1 ⊗ A2.
    const auto m1 = static_cast<Eigen::Index>(ops[0].rows()), m2 = static_cast<Eigen::Index>(ops[1].rows());
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(m1, m1), a2 = Eigen::MatrixXd::Zero(m2, m2);
    for (const Triplet& t : ops[0].triplets()) a1(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
    for (const Triplet& t : ops[1].triplets()) a2(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(m1 * m2, m1 * m2);
    for (Eigen::Index i1 = 0; i1 < m1; ++i1) {
      for (Eigen::Index j1 = 0; j1 < m1; ++j1) {
        for (Eigen::Index i2 = 0; i2 < m2; ++i2) {
          for (Eigen::Index j2 = 0; j2 < m2; ++j2) {
            double v = 0.0;
            if (i2 == j2) v += a1(i1, j1) * masses[1][static_cast<std::size_t>(i2)];
            if (i1 == j1) v += masses[0][static_cast<std::size_t>(i1)] * a2(i2, j2);
            direct(i1 * m2 + i2, j1 * m2 + j2) = v;
          }
        }
      }
    }
    for (Eigen::Index i = 0; i < direct.rows(); ++i) {
      for (Eigen::Index j = 0; j < direct.cols(); ++j) {
        worst = std::max(worst, std::abs(direct(i, j) - k.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j))));
      }
    }

    // Reaction on a corner block, nonnegative sources.
    const DualMesh parts[] = {barycentric_dual(tm.component(0)), barycentric_dual(tm.component(1))};
    const DualMesh d = tensor_dual(tm, parts);
    std::vector<double> reaction(k.rows(), 0.0), f(k.rows(), 0.0);
    for (Index i = 0; i < tm.num_nodes(); ++i) {
      const auto x = tm.node_coordinates(i);
      if (x[0] < 0.5 && x[1] < 1.0) reaction[i] = 5.0 * d.voxel_measure(i);
      if (rng.uniform() < 0.6) f[i] = rng.uniform();
    }
    const SparseOperator system = k + SparseOperator::diagonal(reaction);
    m_ok = m_ok && check_m_matrix(system, 500).passes();
    const std::vector<double> u = solve(make_system(system, assemble_load(d, f)), {});
    for (double v : u) min_u = std::min(min_u, v);
  }
  std::printf("    max |Kronecker - direct| %.2e, min u %.3e\n", worst, min_u);
  record(7, worst <= 1e-13 && m_ok && min_u >= -1e-12,
         fmt("Kronecker vs direct %.1e <= 1e-13; ", worst) + "M-matrix checks " + (m_ok ? "ok" : "failed") +
             fmt("; min u %.2e >= -1e-12", min_u));
}

void criterion_8() {
  std::printf("[8] geometry oracles\n");
  Rng rng(8080);
  std::vector<DualMesh> duals;
  for (std::size_t r : {3, 4, 8, 16}) duals.push_back(barycentric_dual(generate_disk_mesh(r)));

  double worst = 0.0;
  int exact_pairs = 0, draws = 0;
  std::vector<std::pair<Polygon, Ball>> pairs;
  while ((exact_pairs < 100 || pairs.size() < 50) && draws < 100000) {
    ++draws;
    const DualMesh& d = duals[static_cast<std::size_t>(rng.uniform() * static_cast<double>(duals.size()))];
    const VoxelPiece& p = d.piece(static_cast<std::size_t>(rng.uniform() * static_cast<double>(d.pieces().size())));
    const Point g = vertex_centroid(p.polygon);
    double reach = 0.0;
    for (const Point& v : p.polygon) reach = std::max(reach, distance(g, v));
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    const double radius = reach * (0.3 + 3.0 * rng.uniform());
    const double offset = radius + reach * (2.0 * rng.uniform() - 1.0);
    const Ball ball{g + offset * Point{std::cos(angle), std::sin(angle)}, radius};
    const double exact = ball_polygon_area(p.polygon, ball);
    if (!(exact > 0.0 && exact < p.measure)) continue;
    if (exact_pairs < 100) {
      const double oracle = reference_region_integral(p.polygon, [](Point) { return 1.0; },
                                                      RegionSet::ball(ball.center, ball.radius), 1e-12);
      worst = std::max(worst, std::abs(exact - oracle));
      ++exact_pairs;
    }
    // Monte Carlo pairs need a cut fraction the sample standard error can resolve.
    const double fraction = exact / p.measure;
    if (pairs.size() < 50 && fraction >= 0.02 && fraction <= 0.98) pairs.emplace_back(p.polygon, ball);
  }

  std::size_t misses = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [poly, ball] = pairs[k];
    const McEstimate mc = mc_integrate_piece(poly, [](Point) { return 1.0; }, RegionSet::ball(ball.center, ball.radius),
                                             20000, stream_seed(20240901, k, 8));
    if (std::abs(mc.estimate - ball_polygon_area(poly, ball)) > 4.0 * mc.std_error) ++misses;
  }
  std::printf("    %d cut voxel pieces, max |exact - oracle| %.2e; %zu of %zu Monte Carlo pairs outside 4 sigma\n",
              exact_pairs, worst, misses, pairs.size());
  record(8, exact_pairs == 100 && worst <= 1e-8 && pairs.size() == 50 && misses == 0,
         fmt("ball_polygon_area vs oracle %.1e <= 1e-8 on 100 pieces; ", worst) +
             std::to_string(misses) + " of 50 Monte Carlo pairs (cut fraction in [0.02, 0.98]) outside 4 stderr");
}

}  // namespace

int main() {
  const auto start = Clock::now();
  void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                          criterion_5, criterion_6, criterion_7, criterion_8};
  for (std::size_t k = 0; k < std::size(criteria); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      record(static_cast<int>(k) + 1, false, std::string("error: ") + e.what());
    }
  }
  std::printf("summary (%.0f s)\n", seconds_since(start));
  bool all = true;
  for (const Verdict& v : verdicts) {
    std::printf("  %s  criterion %d\n", v.passed ? "PASS" : "FAIL", v.id);
    all = all && v.passed;
  }
  return all ? 0 : 1;
}
