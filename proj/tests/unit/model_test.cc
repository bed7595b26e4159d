#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "myopic/errors.hh"
#include "myopic/model.hh"

using namespace myopic;

namespace {

GridPtr make_grid(double a, double b, int n, std::vector<double> zeros = {}) {
  return std::make_shared<const SpatialGrid>(a, b, n, zeros);
}

}  // namespace

TEST(Coefficient, PowerLawValueAndDerivative) {
  const CoefficientSpec d = CoefficientSpec::power_law(0.0, 0.5);
  const CoefficientValue v = d.eval(0.25);
  EXPECT_DOUBLE_EQ(v.d, 0.5);
  ASSERT_TRUE(v.dx.has_value());
  EXPECT_DOUBLE_EQ(*v.dx, 1.0);
  EXPECT_FALSE(d.eval(0.0).dx.has_value());
  EXPECT_EQ(d.eval(0.0).d, 0.0);
}

TEST(Coefficient, DerivativeMatchesCentralDifferences) {
  const std::vector<CoefficientSpec> specs{
      CoefficientSpec::constant(2.5), CoefficientSpec::power_law(0.1, 0.3, 2.0),
      CoefficientSpec::product({{-0.5, 0.5}, {0.5, 0.25}}), CoefficientSpec::tabulated(-1, 1, {1.0, 0.5, 2.0, 3.0, 1.0})};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> xs(-0.95, 0.95);
  for (const CoefficientSpec& d : specs) {
    for (int k = 0; k < 200; ++k) {
      const double x = xs(rng);
      const CoefficientValue v = d.eval(x);
      if (v.d < 1e-3 || !v.dx) continue;
      const double h = 1e-7;
      // Skip tabulated kinks.
      if (d.eval(x - h).dx != d.eval(x + h).dx && !d.analytic_derivative()) continue;
      const double fd = (d.value(x + h) - d.value(x - h)) / (2 * h);
      EXPECT_NEAR(*v.dx, fd, 1e-5 * std::max(1.0, std::abs(fd))) << d.describe() << " at " << x;
    }
  }
}

TEST(Coefficient, ZerosAndClosedForms) {
  const CoefficientSpec d = CoefficientSpec::power_law(0.0, 0.5);
  const std::vector<double> z = d.zeros_in(-1, 1);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_EQ(z[0], 0.0);
  EXPECT_NEAR(*d.inverse_integral(-1, 1), 4.0, 1e-14);
  EXPECT_NEAR(*d.inverse_log_integral(-1, 1), 4.0, 1e-12);
  EXPECT_FALSE(CoefficientSpec::pathological_power_law(0, 1.5).inverse_integral(-1, 1).has_value());
}

TEST(Coefficient, RejectsBadParameters) {
  EXPECT_THROW(CoefficientSpec::constant(0.0), DomainError);
  EXPECT_THROW(CoefficientSpec::power_law(0, 1.0), DomainError);
  EXPECT_THROW(CoefficientSpec::power_law(0, 0.5, -1.0), DomainError);
  EXPECT_THROW(CoefficientSpec::tabulated(0, 1, {1.0}), DomainError);
  EXPECT_THROW(CoefficientSpec::tabulated(0, 1, {1.0, -1.0}), DomainError);
}

TEST(Absorption, BoundsAndExtension) {
  const AbsorptionSpec lin = AbsorptionSpec::linear();
  EXPECT_EQ(lin.g(0.0), 0.0);
  EXPECT_TRUE(lin.check_bounds());
  const AbsorptionSpec bp = AbsorptionSpec::bounded_perturbation(1.0);
  EXPECT_EQ(bp.g(0.0), 0.0);
  EXPECT_EQ(bp.upper(), 2.0);
  EXPECT_TRUE(bp.check_bounds());
  EXPECT_DOUBLE_EQ(bp.g_over_s(0.0), 2.0);
  EXPECT_NEAR(bp.g_over_s(1e-6), 2.0, 1e-6);
}

TEST(Grid, Invariants) {
  EXPECT_THROW(SpatialGrid(0, 1, 4), DomainError);
  EXPECT_THROW(SpatialGrid(1, 0, 16), DomainError);
  const std::vector<double> zero{0.0};
  // Odd cell count on a symmetric domain puts a center on x = 0.
  EXPECT_THROW(SpatialGrid(-1, 1, 9, zero), DomainError);
  const SpatialGrid g(-1, 1, 10, zero);
  EXPECT_DOUBLE_EQ(g.h(), 0.2);
  const SpatialGrid f = g.refined(9);
  EXPECT_EQ(f.size(), 90);
  for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(f.center(9 * i + 4), g.center(i), 1e-15);
  EXPECT_THROW(g.refined(2), DomainError);
}

TEST(Field, RejectsMalformedInput) {
  GridPtr g = make_grid(0, 1, 8);
  EXPECT_THROW(ScalarField(g, std::vector<double>(7, 1.0)), DomainError);
  EXPECT_THROW(ScalarField(g, std::nan("")), DomainError);
  EXPECT_THROW(ScalarField(nullptr, 1.0), DomainError);
  const ScalarField f = ScalarField::sample(g, [](double x) { return x; });
  EXPECT_NEAR(f.integral(), 0.5, 1e-15);
}

TEST(InitialData, Validation) {
  GridPtr g = make_grid(0, 1, 8);
  EXPECT_THROW(InitialData::make(g, [](double) { return 0.0; }, [](double) { return 1.0; }), DomainError);
  EXPECT_THROW(InitialData::make(g, [](double) { return 1.0; }, [](double x) { return x - 0.5; }), DomainError);
  EXPECT_NO_THROW(InitialData::make(g, [](double) { return 1.0; }, [](double) { return 0.0; }));
}

TEST(Hypotheses, ReferenceScenario) {
  GridPtr g = make_grid(-1, 1, 400, {0.0});
  const CoefficientSpec d = CoefficientSpec::power_law(0.0, 0.5);
  const InitialData init = InitialData::make(g, [](double) { return 1.0; }, [](double x) { return std::abs(x); });
  const HypothesisReport r = validate_hypotheses(d, init, *g);
  EXPECT_TRUE(r.integral_inv_d.analytic);
  EXPECT_NEAR(r.integral_inv_d.value, 4.0, 1e-14);
  EXPECT_NEAR(r.integral_w0_weight.value, 1.0, 0.01);
  EXPECT_NEAR(r.w0_over_d_sup.value, 1.0, 1e-9);
  EXPECT_TRUE(r.w0_vanishes_at_zeros);
  EXPECT_TRUE(r.flags.theorem1);
  EXPECT_TRUE(r.flags.theorem2);
  EXPECT_TRUE(r.flags.theorem3);
  EXPECT_NEAR(mu_infinity(init.u0_field, d, *g), 0.5, 1e-14);
}

TEST(Hypotheses, ConstantCoefficient) {
  GridPtr g = make_grid(0, 2, 32);
  const CoefficientSpec d = CoefficientSpec::constant(1.0);
  const InitialData init = InitialData::make(g, [](double x) { return 1.0 + x; }, [](double) { return 1.0; });
  const HypothesisReport r = validate_hypotheses(d, init, *g);
  EXPECT_NEAR(r.integral_inv_d.value, 2.0, 1e-14);
  EXPECT_TRUE(r.flags.d2);
  EXPECT_TRUE(r.flags.theorem2);
  EXPECT_NEAR(mu_infinity(init.u0_field, d, *g), 2.0, 1e-14);
}

TEST(Hypotheses, PathologicalPowerLawDiverges) {
  GridPtr g = make_grid(-1, 1, 64, {0.0});
  const CoefficientSpec d = CoefficientSpec::pathological_power_law(0.0, 1.5);
  const InitialData init = InitialData::make(g, [](double) { return 1.0; }, [](double x) { return x * x; });
  const HypothesisReport r = validate_hypotheses(d, init, *g);
  EXPECT_FALSE(r.integral_inv_d.finite());
  EXPECT_FALSE(r.flags.d2);
  EXPECT_FALSE(r.flags.theorem2);
  EXPECT_THROW(mu_infinity(init.u0_field, d, *g), HypothesisError);
}

// Wherever the w0 weight integral is resolved, w0 vanishes at the zeros of d.
TEST(Hypotheses, ResolvedWeightImpliesVanishing) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> theta(0.2, 0.8), p(0.5, 2.0), offset(0.0, 0.5), amp(0.5, 2.0);
  GridPtr g = make_grid(-1, 1, 64, {0.0});
  for (int k = 0; k < 8; ++k) {
    const CoefficientSpec d = CoefficientSpec::power_law(0.0, theta(rng));
    const double pk = p(rng), bk = k % 2 == 0 ? 0.0 : offset(rng), ak = amp(rng);
    const InitialData init = InitialData::make(
        g, [](double) { return 1.0; }, [=](double x) { return ak * std::pow(std::abs(x), pk) + bk; });
    const HypothesisReport r = validate_hypotheses(d, init, *g);
    if (r.integral_w0_weight.finite()) { EXPECT_TRUE(r.w0_vanishes_at_zeros) << "case " << k; }
    if (bk > 0) { EXPECT_FALSE(r.w0_vanishes_at_zeros); }
  }
}

TEST(OmegaD, ValuesAndShape) {
  GridPtr g1 = make_grid(0, 1, 100);
  EXPECT_NEAR(omega_d(CoefficientSpec::constant(1.0), *g1, 0.3), 0.3, 1e-12);
  GridPtr g = make_grid(-1, 1, 400, {0.0});
  const CoefficientSpec d = CoefficientSpec::power_law(0.0, 0.5);
  EXPECT_NEAR(omega_d(d, *g, 2.0), 4.0, 1e-12);
  double prev = 0.0;
  for (double delta = 0.01; delta <= 2.0; delta += 0.01) {
    const double w = omega_d(d, *g, delta);
    EXPECT_GE(w, prev - 1e-14);
    prev = w;
  }
  // The two cells next to the zero are the heaviest set of measure 2h.
  EXPECT_NEAR(omega_d(d, *g, 0.01), 4.0 * std::sqrt(0.005), 1e-12);
  EXPECT_THROW(omega_d(d, *g, 0.0), DomainError);
}

TEST(OmegaD, GreedySup) {
  EXPECT_NEAR(greedy_sup({0.1, 0.3, 0.2}, 0.1, 0.15), 0.3 + 0.1, 1e-15);
  EXPECT_NEAR(greedy_sup({0.1, 0.3, 0.2}, 0.1, 1.0), 0.6, 1e-15);
}
