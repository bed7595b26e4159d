#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "myopic/errors.hh"
#include "myopic/oracle.hh"

using namespace myopic;

TEST(HeatOracle, ValuesAndLimits) {
  EXPECT_NEAR(heat_neumann(0.0, 0.1, 1, 1.0), 1.0 + std::exp(-M_PI * M_PI * 0.1), 1e-15);
  EXPECT_NEAR(heat_neumann(0.0, 0.1, 1, 1.0), 1.3727078, 1e-7);
  EXPECT_NEAR(heat_neumann(0.3, 0.0, 2, 1.0), 1.0 + std::cos(0.6 * M_PI), 1e-15);
  EXPECT_NEAR(heat_neumann(0.3, 50.0, 1, 1.0), 1.0, 1e-15);
  // Shifted domain and diffusivity.
  EXPECT_NEAR(heat_neumann(-1.0, 0.2, 1, 2.0, 3.0, -1.0), 1.0 + std::exp(-3.0 * M_PI * M_PI / 4.0 * 0.2), 1e-15);
}

// Independent cross-check of the decay factor by its truncated Taylor series.
TEST(HeatOracle, SeriesCrossCheck) {
  const double z = -M_PI * M_PI * 0.1;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= z / k;
    sum += term;
  }
  EXPECT_NEAR(heat_neumann(0.0, 0.1, 1, 1.0), 1.0 + sum, 1e-14);
}

TEST(HeatOracle, SatisfiesPde) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> xs(0.05, 0.95), ts(0.01, 0.5);
  const double h = 5e-3, k = 1e-3;
  for (int n = 0; n < 20; ++n) {
    const double x = xs(rng), t = ts(rng);
    auto f = [](double xx, double tt) { return heat_neumann(xx, tt, 1, 1.0); };
    const double uxx = (-f(x + 2 * h, t) + 16 * f(x + h, t) - 30 * f(x, t) + 16 * f(x - h, t) - f(x - 2 * h, t)) /
                       (12 * h * h);
    const double ut = (-f(x, t + 2 * k) + 8 * f(x, t + k) - 8 * f(x, t - k) + f(x, t - 2 * k)) / (12 * k);
    EXPECT_NEAR(ut, uxx, 1e-7);
  }
  // Neumann condition.
  EXPECT_NEAR((heat_neumann(1e-6, 0.1, 1, 1.0) - heat_neumann(0.0, 0.1, 1, 1.0)) / 1e-6, 0.0, 1e-5);
}

TEST(AbsorptionOracle, ClosedFormAndIntegrator) {
  const AbsorptionSpec lin = AbsorptionSpec::linear();
  EXPECT_NEAR(absorption_ode(1.0, 1.0, lin, std::log(2.0)), 0.5, 1e-15);
  EXPECT_EQ(absorption_ode(0.7, 0.0, lin, 3.0), 0.7);
  // The integrator path with a vanishing perturbation reproduces the closed form.
  const AbsorptionSpec zero = AbsorptionSpec::bounded_perturbation(0.0);
  EXPECT_NEAR(absorption_ode(1.3, 2.0, zero, 1.5), 1.3 * std::exp(-3.0), 1e-10);
}

// Pinned against an independent fixed-step RK4 solve.
TEST(AbsorptionOracle, BoundedPerturbation) {
  const AbsorptionSpec g = AbsorptionSpec::bounded_perturbation(1.0);
  double w = 1.0;
  const int steps = 20000;
  const double dt = 2.0 / steps;
  auto rhs = [&](double s) { return -1.5 * g.g(s); };
  for (int k = 0; k < steps; ++k) {
    const double k1 = rhs(w), k2 = rhs(w + 0.5 * dt * k1), k3 = rhs(w + 0.5 * dt * k2), k4 = rhs(w + dt * k3);
    w += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  EXPECT_NEAR(absorption_ode(1.0, 1.5, g, 2.0), w, 1e-11);
}

TEST(References, Evaluators) {
  const ReferenceSolution heat = ReferenceSolution::heat_mode(1.0, 1, 0.0, 1.0, 1.0);
  EXPECT_NEAR(heat.evaluator(0.0, 0.1), heat_neumann(0.0, 0.1, 1, 1.0), 1e-15);
  const ReferenceSolution abs = ReferenceSolution::absorption(1.0, 1.0, AbsorptionSpec::linear());
  EXPECT_NEAR(abs.evaluator(0.3, std::log(2.0)), 0.5, 1e-15);
  GridPtr g = std::make_shared<const SpatialGrid>(0, 1, 8);
  const ReferenceSolution steady =
      ReferenceSolution::steady_profile(0.5, ScalarField(g, {1.0, 2.0, 4.0, 5.0, 4.0, 8.0, 1.0, 1.0}));
  EXPECT_DOUBLE_EQ(steady.evaluator(0.7, 3.0), 0.0625);
}

TEST(Moments, PanelAndMass) {
  GridPtr g = std::make_shared<const SpatialGrid>(0, 1, 16);
  const ScalarField d(g, 2.0);
  const std::vector<TestFunction> panel = standard_test_panel(d);
  ASSERT_EQ(panel.size(), 8u);
  std::vector<ScalarField> fields;
  for (const TestFunction& t : panel) fields.push_back(t.field);
  SimState s;
  s.u = ScalarField(g, 0.25);
  s.w = ScalarField(g, 1.0);
  const std::vector<double> m = moment_against_test_functions(s, fields);
  EXPECT_NEAR(m[0], 0.25, 1e-15);
  EXPECT_NEAR(m[1] + m[2], m[0], 1e-15);
  EXPECT_NEAR(m[6], 0.5, 1e-15);
}

TEST(ConvergenceOrder, Slopes) {
  const std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e2, e1;
  for (double h : hs) {
    e2.push_back(3.0 * h * h);
    e1.push_back(0.2 * h);
  }
  EXPECT_NEAR(convergence_order(e2, hs), 2.0, 1e-12);
  EXPECT_NEAR(convergence_order(e1, hs), 1.0, 1e-12);
  EXPECT_THROW(convergence_order(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DomainError);
  EXPECT_THROW(convergence_order(std::vector<double>{1, 0, 1}, std::vector<double>{1, 0.5, 0.25}), DomainError);
  EXPECT_THROW(convergence_order(std::vector<double>{1, 1, 1}, std::vector<double>{1, 0.5, 0.75}), DomainError);
}
