#ifndef MYOPIC_ORACLE_HH_
#define MYOPIC_ORACLE_HH_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "myopic/absorption.hh"
#include "myopic/field.hh"
#include "myopic/state.hh"

namespace myopic {

/// 1 + cos(k pi (x - left)/L) exp(-D (k pi/L)^2 t): the unit-mean Neumann heat
/// mode on (left, left + L) with diffusivity D.
double heat_neumann(double x, double t, int k, double L, double diffusivity = 1.0, double left = 0.0);

/// w(t) for w' = -u g(w), w(0) = w0_val: closed form for linear g, adaptive
/// Dormand-Prince integration otherwise.
double absorption_ode(double w0_val, double u_const, const AbsorptionSpec& g, double t);

/// Exact solution of a special case, evaluated at (x, t).
struct ReferenceSolution {
  enum class Kind { HeatNeumannMode, AbsorptionODE, SteadyProfile };
  Kind kind;
  std::function<double(double, double)> evaluator;

  static ReferenceSolution heat_mode(double amplitude, int k, double left, double L, double diffusivity);
  static ReferenceSolution absorption(double w0_val, double u_const, AbsorptionSpec g);
  /// mu_inf / d_eps at the cell containing x, time independent.
  static ReferenceSolution steady_profile(double mu_inf, ScalarField d_eps);
};

/// sum_i u_i phi_i h for each test field.
std::vector<double> moment_against_test_functions(const SimState& s, std::span<const ScalarField> tests);

struct TestFunction {
  std::string name;
  ScalarField field;
};

/// Eight fixed test functions: the constant, indicators of both halves and of
/// the first three quarters, d_eps itself, and the sawtooth frac(2(x-a)/L).
std::vector<TestFunction> standard_test_panel(const ScalarField& d_eps);

/// Least-squares slope of log(error) against log(h). Requires at least three
/// pairs, strictly monotone h and positive errors.
double convergence_order(std::span<const double> errors, std::span<const double> hs);

}  // namespace myopic

#endif
