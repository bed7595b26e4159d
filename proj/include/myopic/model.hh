#ifndef MYOPIC_MODEL_HH_
#define MYOPIC_MODEL_HH_

#include <optional>
#include <string>
#include <vector>

#include "myopic/absorption.hh"
#include "myopic/coefficient.hh"
#include "myopic/field.hh"
#include "myopic/grid.hh"

namespace myopic {

/// Initial data given as profiles (so that hypothesis integrals can be refined
/// past the simulation grid) together with their cell-center samples.
struct InitialData {
  Profile u0;
  Profile w0;
  ScalarField u0_field;
  ScalarField w0_field;

  /// Samples both profiles and checks u0 >= 0, u0 not identically zero, w0 >= 0.
  static InitialData make(GridPtr grid, Profile u0, Profile w0);

  /// Discrete H^1 seminorm squared of sqrt(w0): sum of squared difference
  /// quotients times h.
  double sqrt_w0_h1() const;
};

/// A quadrature value with its provenance: closed form, or midpoint rule at
/// n and 2n cells with the relative change between the two.
struct IntegralEstimate {
  double value = 0.0;
  bool analytic = false;
  bool resolved = false;
  double refinement_change = 0.0;
  int cells = 0;

  bool finite() const { return analytic || resolved; }
};

/// Midpoint rule over cells whose midpoints avoid `zeros`, evaluated at n and
/// 2n cells; resolved when the two agree to `rel_tol`.
IntegralEstimate refined_midpoint(const Profile& f, double a, double b, std::vector<double> zeros, int n,
                                  double rel_tol = 0.01);

struct HypothesisFlags {
  bool d2 = false;         // integral of 1/d finite
  bool init = false;       // u0 >= 0, u0 != 0, w0 >= 0, sqrt(w0) with finite discrete H^1 seminorm
  bool w0_weight = false;  // integral of (d_x^2/d) w0 finite
  bool log_integrable = false;  // integral of (1/d) ln(1/d) finite
  bool w0_over_d = false;       // w0/d bounded
  bool absorption = false;      // ug <= g' <= og sampled
  bool theorem1 = false;
  bool theorem2 = false;
  bool theorem3 = false;
};

struct HypothesisReport {
  IntegralEstimate integral_inv_d;
  IntegralEstimate integral_inv_d_log;
  IntegralEstimate integral_w0_weight;
  IntegralEstimate w0_over_d_sup;  // value is the sampled sup; `resolved` means stable under refinement
  bool w0_vanishes_at_zeros = false;
  double sqrt_w0_h1 = 0.0;
  std::vector<double> zeros;
  HypothesisFlags flags;
  std::vector<std::string> notes;
};

/// Quadrature cells used by validate_hypotheses, independent of the simulation grid.
inline constexpr int kHypothesisQuadratureCells = 1 << 16;

HypothesisReport validate_hypotheses(const CoefficientSpec& d, const InitialData& init, const SpatialGrid& grid,
                                     const AbsorptionSpec& g = AbsorptionSpec::linear());

/// Integral of 1/d over the grid domain: closed form when available, otherwise
/// refined midpoint quadrature.
IntegralEstimate inverse_integral(const CoefficientSpec& d, const SpatialGrid& grid);

/// (integral u0) / (integral 1/d). Throws HypothesisError when the integral of
/// 1/d is unresolved.
double mu_infinity(const ScalarField& u0, const CoefficientSpec& d, const SpatialGrid& grid);

/// Integral of 1/d over each grid cell (closed form per cell when available,
/// midpoint otherwise).
std::vector<double> cell_inverse_integrals(const CoefficientSpec& d, const SpatialGrid& grid);

/// Discrete equi-integrability modulus: sup of the integral of 1/d over sets of
/// measure <= delta, by greedy accumulation of cells sorted by mean 1/d.
double omega_d(const CoefficientSpec& d, const SpatialGrid& grid, double delta);

/// Greedy sup of sum_E a_i h over cell sets E of measure <= delta (fractional
/// last cell); `cell_integrals` holds a_i h per cell.
double greedy_sup(std::vector<double> cell_integrals, double h, double delta);

}  // namespace myopic

#endif
