#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "voxquad/error.hpp"
#include "voxquad/studies.hpp"

using namespace voxquad;

namespace {

StudyConfig small_config() {
  StudyConfig c;
  c.rings = {2, 4, 8};
  c.radial_elements = 2000;
  c.integration.integrator = Integrator::Adaptive;
  return c;
}

std::string csv(const StudyReport& r) {
  std::ostringstream out;
  r.write_csv(out);
  return out.str();
}

}  // namespace

TEST(EstimateRate, ExactPowers) {
  const std::vector<double> hs{0.4, 0.2, 0.1, 0.05, 0.025};
  std::vector<double> sq, flat, p15;
  for (double h : hs) {
    sq.push_back(3.0 * h * h);
    flat.push_back(0.7);
    p15.push_back(0.2 * std::pow(h, 1.5));
  }
  EXPECT_NEAR(estimate_rate(hs, sq), 2.0, 1e-12);
  EXPECT_NEAR(estimate_rate(hs, flat), 0.0, 1e-12);
  EXPECT_NEAR(estimate_rate(hs, p15), 1.5, 1e-12);
  EXPECT_NEAR(estimate_rate(hs, sq), oracle::loglog_slope(hs, sq), 1e-12);
}

TEST(EstimateRate, RejectsBadInput) {
  const std::vector<double> one{0.1};
  EXPECT_THROW(estimate_rate(one, one), InvalidArgument);
  const std::vector<double> hs{0.1, 0.05}, bad{1e-3, 0.0};
  EXPECT_THROW(estimate_rate(hs, bad), InvalidArgument);
}

TEST(StudyConfig, Validation) {
  StudyConfig c;
  EXPECT_NO_THROW(c.validate());
  c.rings = {8, 4};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.rings = {4, 8};
  c.lambda_bar = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.lambda_bar = 5.0;
  c.rstar = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Convergence, WholeDomainReactionIsExact) {
  StudyConfig c = small_config();
  c.rstar = 2.0;
  c.kappa_bar = 0.0;
  const StudyReport r = run_convergence(c);
  ASSERT_EQ(r.columns, (std::vector<std::string>{"h", "lump", "integrate"}));
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    EXPECT_LE(row[1], 1e-9);
    EXPECT_LE(row[2], 1e-9);
  }
}

TEST(Convergence, ErrorsDecreaseAndCsvIsDeterministic) {
  StudyConfig c = small_config();
  c.method = MethodChoice::Lump;
  const StudyReport a = run_convergence(c);
  const StudyReport b = run_convergence(c);
  EXPECT_EQ(csv(a), csv(b));
  ASSERT_EQ(a.columns.size(), 2u);
  EXPECT_GT(a.rows[0][1], a.rows[2][1]);
  EXPECT_GT(a.rate("lump"), 1.0);
  EXPECT_EQ(a.values("h").size(), 3u);
  EXPECT_EQ(a.rates.size(), 1u);
  EXPECT_EQ(a.finest_half_rates.size(), 1u);
  EXPECT_THROW(a.column("integrate"), InvalidArgument);
}

TEST(Convergence, MonteCarloSeedIsHonoured) {
  StudyConfig c = small_config();
  c.method = MethodChoice::Average;
  c.integration.integrator = Integrator::MonteCarlo;
  c.integration.samples_per_h2 = 20.0;
  c.rings = {2, 3};
  const std::string a = csv(run_convergence(c));
  EXPECT_EQ(a, csv(run_convergence(c)));
  c.integration.seed += 1;
  EXPECT_NE(a, csv(run_convergence(c)));
}

TEST(StudyReport, CsvLayout) {
  StudyReport r;
  r.columns = {"h", "L2"};
  r.rows = {{0.5, 0.1}, {0.25, 1.0 / 3.0}};
  const std::string text = csv(r);
  EXPECT_EQ(text, "h,L2\n0.5,0.10000000000000001\n0.25,0.33333333333333331\n");
}

TEST(Supercloseness, ColumnsAndDecay) {
  StudyConfig c = small_config();
  c.integration.samples_per_h2 = 200.0;
  const StudyReport r = run_supercloseness(c);
  ASSERT_EQ(r.columns, (std::vector<std::string>{"h", "L2", "H1"}));
  for (const auto& row : r.rows) {
    EXPECT_GT(row[1], 0.0);
    EXPECT_GT(row[2], 0.0);
  }
}

TEST(LocalOrders, InterfaceCountLinear) {
  StudyConfig c = small_config();
  c.rings = {4, 8, 16};
  c.method = MethodChoice::Lump;
  const StudyReport r = run_local_orders(c);
  ASSERT_EQ(r.columns, (std::vector<std::string>{"h", "lump_interior", "lump_interface", "interface_count"}));
  EXPECT_NEAR(r.rate("interface_count"), -1.0, 0.15);
  EXPECT_GT(r.rate("lump_interior"), 1.5);
}

TEST(DiskProblem, ReferenceMatchesRadialSolution) {
  StudyConfig c = small_config();
  const DiskSolution s = solve_disk_problem(generate_disk_mesh(8), c, SplitMode::Lumping);
  ASSERT_EQ(s.u.size(), s.mesh.num_nodes());
  EXPECT_LT(discrete_l2_relative_error(s.dual, s.u, s.reference), 1e-2);
  EXPECT_LE(s.solve.residual, 1e-10);
}

TEST(Verify, PristineAndFaults) {
  for (const VerifyCheck& c : run_verify()) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;

  VerifyFaults flip;
  flip.flip_bernoulli = true;
  bool reduction_failed = false;
  for (const VerifyCheck& c : run_verify(flip)) {
    if (c.name == "EAFE psi=0 reduction") reduction_failed = !c.passed;
  }
  EXPECT_TRUE(reduction_failed);

  VerifyFaults voxel;
  voxel.corrupt_voxel = true;
  bool dual_failed = false;
  for (const VerifyCheck& c : run_verify(voxel)) {
    if (c.name == "dual identities") dual_failed = !c.passed;
    else EXPECT_TRUE(c.passed) << c.name;
  }
  EXPECT_TRUE(dual_failed);
}
