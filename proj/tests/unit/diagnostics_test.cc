#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "myopic/errors.hh"
#include "myopic/model.hh"
#include "myopic/solver.hh"

using namespace myopic;

namespace {

RegularizationFamily star_family(int n) {
  const std::vector<double> zero{0.0};
  GridPtr g = std::make_shared<const SpatialGrid>(-1, 1, n, zero);
  return RegularizationFamily::build(CoefficientSpec::power_law(0.0, 0.5), [](double x) { return std::abs(x); }, g, 2);
}

SimState make_state(const FamilySlice& slice, ScalarField u, ScalarField w) {
  SimState s;
  s.u = std::move(u);
  s.w = std::move(w);
  s.eps = slice.eps;
  return s;
}

}  // namespace

TEST(Record, SteadyProfileHasNoDissipation) {
  const RegularizationFamily f = star_family(100);
  const FamilySlice slice = f.slice(2);
  std::vector<double> u(100);
  for (int i = 0; i < 100; ++i) u[static_cast<std::size_t>(i)] = 0.7 / slice.d_eps[i];
  const SimState s = make_state(slice, ScalarField(f.grid_ptr(), u), ScalarField(f.grid_ptr(), std::pow(slice.eps, 0.25)));
  const DiagnosticsRecord r = record(s, slice, AbsorptionSpec::linear(), {}, 0.05);
  EXPECT_NEAR(r.D1, 0.0, 1e-13);
  EXPECT_EQ(r.D2, 0.0);
  EXPECT_EQ(r.D3, 0.0);
  EXPECT_EQ(r.E2, 0.0);
  EXPECT_NEAR(r.mu, 0.7, 1e-14);
  EXPECT_NEAR(r.dev_L1, 0.0, 1e-13);
  EXPECT_NEAR(r.ln_du_min, std::log(0.7), 1e-14);
  EXPECT_NEAR(r.ln_du_max, std::log(0.7), 1e-14);
  EXPECT_NEAR(r.E_total, r.E1 + r.E2 + r.E3, 1e-15);
}

TEST(Record, EntropyOfConstantState) {
  GridPtr g = std::make_shared<const SpatialGrid>(0, 2, 32);
  const RegularizationFamily f =
      RegularizationFamily::build(CoefficientSpec::constant(1.0), [](double) { return 1.0; }, g, 3);
  for (int j = 1; j <= 3; ++j) {
    const FamilySlice slice = f.slice(j);
    const SimState s = make_state(slice, ScalarField(g, 1.0), ScalarField(g, 0.5));
    const DiagnosticsRecord r = record(s, slice, AbsorptionSpec::linear(), {}, 0.05);
    EXPECT_NEAR(r.E1, std::log(1.0 + 2.0 * std::pow(3.0, -j)) * 2.0, 1e-14);
    EXPECT_EQ(r.E3, 0.0);
    EXPECT_NEAR(r.mass_u, 2.0, 1e-14);
    EXPECT_NEAR(r.mass_w, 1.0, 1e-14);
  }
}

TEST(Record, DeviationVanishesOnlyForEquilibria) {
  const RegularizationFamily f = star_family(40);
  const FamilySlice slice = f.slice(1);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  std::vector<double> u(40);
  for (double& x : u) x = dist(rng);
  const SimState s = make_state(slice, ScalarField(f.grid_ptr(), u), ScalarField(f.grid_ptr(), 0.3));
  EXPECT_GT(record(s, slice, AbsorptionSpec::linear(), {}, 0.05).dev_L1, 1e-3);
}

TEST(Accumulators, Trapezoid) {
  Accumulators acc;
  acc.advance({1.0, 2.0, 3.0, 4.0}, {3.0, 2.0, 1.0, 0.0}, 0.5);
  EXPECT_DOUBLE_EQ(acc.cum_dissipation, 1.0);
  EXPECT_DOUBLE_EQ(acc.cum_wx_l2, 1.0);
  EXPECT_DOUBLE_EQ(acc.cum_dev_sq, 1.0);
  EXPECT_DOUBLE_EQ(acc.cum_uw, 1.0);
}

TEST(Equi, KnownValues) {
  GridPtr g = std::make_shared<const SpatialGrid>(0, 1, 10);
  SimState s;
  s.u = ScalarField(g, 2.0);
  s.w = ScalarField(g, 1.0);
  EXPECT_NEAR(equi_integrability(s, 0.25), 0.5, 1e-15);
  EXPECT_NEAR(equi_integrability(s, 1.0), 2.0, 1e-15);
}

// int_E u <= omega_d(|E|) * max(d u) for any state.
TEST(Equi, BoundedByCoefficientModulus) {
  const RegularizationFamily f = star_family(200);
  const FamilySlice slice = f.slice(2);
  const CoefficientSpec d = CoefficientSpec::power_law(0.0, 0.5);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> u(200);
    double du_max = 0.0;
    for (int i = 0; i < 200; ++i) {
      u[static_cast<std::size_t>(i)] = dist(rng) / slice.d_eps[i];
      du_max = std::max(du_max, slice.d_eps[i] * u[static_cast<std::size_t>(i)]);
    }
    SimState s;
    s.u = ScalarField(f.grid_ptr(), u);
    s.w = ScalarField(f.grid_ptr(), 1.0);
    for (double delta : {0.01, 0.1, 0.5})
      EXPECT_LE(equi_integrability(s, delta), omega_d(d, f.grid(), delta) * du_max + 1e-12);
  }
}

TEST(EnergyCheck, DetectsGrowth) {
  std::vector<DiagnosticsRecord> recs(3);
  for (int k = 0; k < 3; ++k) {
    recs[static_cast<std::size_t>(k)].t = k;
    recs[static_cast<std::size_t>(k)].E_total = 5.0 - k;
  }
  const AbsorptionSpec g = AbsorptionSpec::linear();
  EXPECT_EQ(energy_slope_check(recs, g, 2.0, 1e-8, 0.0).violations, 0);
  std::reverse(recs.begin(), recs.end());
  for (int k = 0; k < 3; ++k) recs[static_cast<std::size_t>(k)].t = k;
  const EnergyCheck c = energy_slope_check(recs, g, 2.0, 1e-8, 0.0);
  EXPECT_EQ(c.violations, 2);
  EXPECT_NEAR(c.worst_excess, 1.0 - energy_source(g, 2.0, 1e-8), 1e-12);
}

TEST(EnergySource, Formula) {
  EXPECT_NEAR(energy_source(AbsorptionSpec::linear(), 4.0, 1e-4), std::sqrt(4e-4) / 2.0, 1e-16);
  const AbsorptionSpec bp = AbsorptionSpec::bounded_perturbation(1.0);
  EXPECT_NEAR(energy_source(bp, 1.0, 1.0), std::sqrt(32.0) / 2.0, 1e-14);
}

TEST(Reports, StabilizationAndBlowup) {
  std::vector<DiagnosticsRecord> recs(11);
  for (int k = 0; k <= 10; ++k) {
    DiagnosticsRecord& r = recs[static_cast<std::size_t>(k)];
    r.t = k;
    r.mu = 0.5;
    r.dev_L1 = 0.01;
    r.w_inf = 1e-4;
    r.cum_dev_sq = 1.0 - std::exp(-k);
    r.ln_du_max = 1.0;
    r.ln_du_min = -2.0;
  }
  const StabilizationReport s = stabilization_report(recs, 0.5, 2.0);
  EXPECT_EQ(s.mu_rel, 0.0);
  EXPECT_NEAR(s.dev_rel, 0.01, 1e-15);
  EXPECT_TRUE(s.dev_sq_saturated);
  const BlowupReport b = blowup_report(recs, 2.0);
  EXPECT_EQ(b.max_ln_du, 1.0);
  EXPECT_EQ(b.max_neg_ln_du, 2.0);
  EXPECT_NEAR(b.c2, std::exp(1.0), 1e-15);
  EXPECT_NEAR(b.ln_cubed_integral, 8.0 * 8.0, 1e-12);
  EXPECT_THROW(blowup_report(recs, 10.0), DomainError);
}

TEST(Run, IntegratedEnergyInequality) {
  const RegularizationFamily f = star_family(100);
  RunSetup rs;
  rs.slice = f.slice(2);
  rs.u0 = ScalarField::sample(f.grid_ptr(), [](double x) { return 1.0 + 0.5 * std::cos(2 * x); });
  rs.params.t_end = 1.0;
  rs.params.sample_interval = 0.05;
  const Trajectory tr = run(rs);
  const double source = energy_source(rs.g, tr.m_bound, rs.slice.eps);
  for (const DiagnosticsRecord& r : tr.records) {
    EXPECT_LE(r.E_total + r.cum_dissipation, tr.records.front().E_total + source * r.t + 1e-6);
    EXPECT_NEAR(r.mass_u, tr.records.front().mass_u, 1e-13);
  }
  for (std::size_t k = 1; k < tr.records.size(); ++k)
    EXPECT_GE(tr.records[k].cum_dev_sq, tr.records[k - 1].cum_dev_sq);
}
