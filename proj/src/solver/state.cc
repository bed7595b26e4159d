#include "myopic/state.hh"

#include <cmath>

#include "myopic/errors.hh"

namespace myopic {

void SolverParams::validate() const {
  if (!(dt_max > 0.0)) throw DomainError("solver.dt_max must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw DomainError("solver.cfl_safety must lie in (0, 1]");
  if (!(t_end >= 0.0)) throw DomainError("solver.t_end must be nonnegative");
  if (!(sample_interval > 0.0)) throw DomainError("solver.sample_interval must be positive");
  if (!(tol_newton > 0.0)) throw DomainError("solver.tol_newton must be positive");
  if (steady_tol < 0.0) throw DomainError("solver.steady_tol must be nonnegative");
  if (max_steps <= 0) throw DomainError("solver.max_steps must be positive");
  if (!(equi_delta > 0.0)) throw DomainError("outputs.equi_delta must be positive");
  for (double t : snapshot_times)
    if (!(t >= 0.0)) throw DomainError("snapshot times must be nonnegative");
}

SimState SimState::initial(const FamilySlice& slice, const ScalarField& u0) {
  SimState s;
  s.u = u0;
  s.w = slice.w0eps;
  s.eps = slice.eps;
  if (u0.size() != slice.d_eps.size()) throw DomainError("initial u0 and family slice live on different grids");
  return s;
}

bool SimState::valid() const {
  for (int i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i]) || u[i] < 0.0 || !std::isfinite(w[i]) || !(w[i] > 0.0)) return false;
  return std::isfinite(t);
}

}  // namespace myopic
