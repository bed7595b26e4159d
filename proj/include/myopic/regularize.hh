#ifndef MYOPIC_REGULARIZE_HH_
#define MYOPIC_REGULARIZE_HH_

#include <vector>

#include "myopic/coefficient.hh"
#include "myopic/field.hh"
#include "myopic/grid.hh"

namespace myopic {

/// The approximations d_eps are built on a working grid refined by this odd
/// factor, so every simulation center is also a working center.
inline constexpr int kWorkingRefinement = 9;
inline constexpr int kMollifierNodes = 128;
inline constexpr int kBisectionSteps = 60;

/// One smoothed, lifted coefficient phi_j = rho_eta * psi_delta + 2 * 3^-j.
struct DEpsMember {
  int j = 0;
  double delta = 0.0;          // domain squeeze parameter
  double eta = 0.0;            // mollifier radius
  double squeeze_error = 0.0;  // sup |psi_delta - d| on the working grid
  double mollify_error = 0.0;  // sup |rho_eta * psi_delta - psi_delta| on the working grid
  double endpoint_dx_left = 0.0;
  double endpoint_dx_right = 0.0;
  std::vector<double> work_values;  // phi_j at working centers
  std::vector<double> work_dx;      // centered differences of phi_j at working centers
  ScalarField field;                // restriction to simulation centers
  ScalarField derivative;
};

/// Builds phi_j: (i) squeeze psi_delta(x) = d(c + (1+delta)(x-c)) clamped to the
/// end values, with the largest delta keeping sup|psi - d| <= 1/(2 3^j) and the
/// derivative within 1/(2j) on the compact K_j; (ii) convolution with the
/// normalized bump of the largest admissible radius eta < delta R/(1+delta)
/// meeting the same tolerances; (iii) shift by 2 3^-j.
DEpsMember build_d_eps(const CoefficientSpec& d, const GridPtr& grid, int j);

/// Interval of {d > 0} with the ramp width used at level j.
struct RampInterval {
  int index = 0;  // 1-based, left to right
  double a = 0.0;
  double b = 0.0;
  bool left_degenerate = false;   // d(a) = 0
  bool right_degenerate = false;  // d(b) = 0
  double delta = 0.0;
  bool included = false;  // index <= j
};

/// Piecewise linear cutoff zeta_j(x), vanishing within delta of each zero of d.
double ramp_factor(const std::vector<RampInterval>& intervals, double x);

struct W0jMember {
  int j = 0;
  std::vector<RampInterval> intervals;
  std::vector<double> work_values;  // zeta_j^2 w0 at working centers
  ScalarField field;                // zeta_j^2 w0 at simulation centers
};

/// w0j = zeta_j^2 w0 with per-interval ramps of width
/// min{(b_i - a_i)/4, 1/j, largest delta with sup d <= 2^-i on the 2 delta
/// neighbourhood of each degenerate endpoint}.
W0jMember build_w0j(const Profile& w0, const CoefficientSpec& d, const GridPtr& grid, int j);

/// Every candidate term of the recursive epsilon choice; `value` is their minimum.
struct EpsilonTerms {
  int j = 0;
  double halving = 0.0;       // eps_{j-1}/2
  double power = 0.0;         // 3^{-4j}
  double inv_d3 = 0.0;        // (int phi_x^2/phi^3)^{-1/2}
  double inv_d4 = 0.0;        // (int phi_x^4/phi^2)^{-2}
  double ratio_sup = 0.0;     // ||phi_x/phi||^{-4}
  double eps1 = 0.0;          // gradient-energy bound of the shifted w0j
  double eps2 = 0.0;          // weighted w0 bound
  double reciprocal_j = 0.0;  // 1/j
  double value = 0.0;
};

struct EpsilonSelection {
  double c1 = 0.0;  // max_j int d w0j_x^2 / w0j
  double c2 = 0.0;  // int (d_x^2/d) w0
  std::vector<EpsilonTerms> terms;
};

/// Selects eps_1 > eps_2 > ... for the candidates built at j = 1..j_max.
/// Integral constraints that vanish count as +infinity.
EpsilonSelection select_epsilons(const std::vector<DEpsMember>& phis, const std::vector<W0jMember>& w0js,
                                 const CoefficientSpec& d, const Profile& w0, const SpatialGrid& grid, int j_max);

struct LedgerRow {
  int j = 0;
  double eps = 0.0;
  double grad_sq_cubed = 0.0;   // eps^2 int d_x^2/d^3
  double grad_quartic = 0.0;  // sqrt(eps) int d_x^4/d^2
  double floor_ratio = 0.0;   // eps^{1/4}/min d
  double log_slope = 0.0;  // eps^{1/4} ||d_x/d||
  double w0_gradient_energy = 0.0;   // int d (w0eps_x)^2/w0eps
  double w0_weighted_mass = 0.0;   // int (d_x^2/d) w0eps
  double sup_distance = 0.0;
};

struct PropertyLedger {
  std::vector<LedgerRow> rows;
  double max_w0_gradient_energy = 0.0;
  double max_w0_weighted_mass = 0.0;
  bool monotone = true;  // d_{eps_{j+1}} <= d_{eps_j} at every simulation center
  bool sandwich = true;  // d + 3^-j <= d_{eps_j} <= d + 3 3^-j at every simulation center
  double worst_monotone_excess = 0.0;
};

/// Data handed to the solver for one member of the family.
struct FamilySlice {
  int j = 0;
  double eps = 0.0;
  ScalarField d_eps;
  ScalarField d_eps_x;
  ScalarField w0eps;
};

class RegularizationFamily {
 public:
  /// Builds phi_j and w0j for j = 1..j_max (members in parallel when workers > 1),
  /// then selects the epsilons and evaluates the ledger.
  static RegularizationFamily build(const CoefficientSpec& d, const Profile& w0, GridPtr grid, int j_max,
                                    int workers = 1);

  int j_max() const { return static_cast<int>(epsilons_.size()); }
  const std::vector<double>& epsilons() const { return epsilons_; }
  double eps(int j) const { return epsilons_.at(static_cast<std::size_t>(j - 1)); }
  const DEpsMember& d_eps(int j) const { return phis_.at(static_cast<std::size_t>(j - 1)); }
  const W0jMember& w0j(int j) const { return w0js_.at(static_cast<std::size_t>(j - 1)); }
  ScalarField w0eps(int j) const;
  const EpsilonSelection& selection() const { return selection_; }
  const PropertyLedger& ledger() const { return ledger_; }
  const SpatialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const CoefficientSpec& coefficient() const { return d_; }

  FamilySlice slice(int j) const;
  /// d_eps = phi_j for eps in (eps_{j+1}, eps_j]; eps below eps_{j_max} maps to j_max.
  FamilySlice slice_for_eps(double eps) const;

 private:
  RegularizationFamily(CoefficientSpec d, GridPtr grid) : d_(std::move(d)), grid_(std::move(grid)) {}

  CoefficientSpec d_;
  GridPtr grid_;
  std::vector<DEpsMember> phis_;
  std::vector<W0jMember> w0js_;
  std::vector<double> epsilons_;
  EpsilonSelection selection_;
  PropertyLedger ledger_;
};

/// Ledger values for a built family, without enforcing bounds.
PropertyLedger compute_ledger(const RegularizationFamily& family);

/// compute_ledger plus enforcement: throws RegularizationError naming j and the
/// value when one of the four unit bounds exceeds 1 + 1e-9, or monotonicity or
/// the sandwich fails.
PropertyLedger verify_family(const RegularizationFamily& family);

}  // namespace myopic

#endif
