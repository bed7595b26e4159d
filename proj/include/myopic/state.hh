#ifndef MYOPIC_STATE_HH_
#define MYOPIC_STATE_HH_

#include <vector>

#include "myopic/field.hh"
#include "myopic/regularize.hh"

namespace myopic {

/// How the artificial eps-diffusion of w is advanced. Explicit is the plain
/// central update; linearly implicit freezes the coefficient d/sqrt(g(w)) at the
/// old level and solves one tridiagonal system, which removes the sqrt(w_min)
/// step restriction once w has decayed.
enum class WDiffusion { LinearlyImplicit, Explicit };

struct SolverParams {
  double dt_max = 1e-2;
  double cfl_safety = 0.9;
  double t_end = 1.0;
  double sample_interval = 0.1;
  double tol_newton = 1e-10;  // residual tolerance of the implicit solves
  WDiffusion w_diffusion = WDiffusion::LinearlyImplicit;
  double steady_tol = 0.0;  // relative deviation for early stop; 0 disables
  long max_steps = 10'000'000;
  std::vector<double> snapshot_times;
  double equi_delta = 0.05;

  /// Throws DomainError on nonpositive values or cfl_safety > 1.
  void validate() const;
};

struct SimState {
  double t = 0.0;
  ScalarField u;
  ScalarField w;
  double eps = 0.0;
  long step_count = 0;

  static SimState initial(const FamilySlice& slice, const ScalarField& u0);

  /// u >= 0, w > 0, all finite.
  bool valid() const;
};

}  // namespace myopic

#endif
