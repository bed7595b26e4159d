#ifndef MYOPIC_SOLVER_HH_
#define MYOPIC_SOLVER_HH_

#include <functional>
#include <vector>

#include "myopic/absorption.hh"
#include "myopic/diagnostics.hh"
#include "myopic/state.hh"

namespace myopic {

/// One IMEX step of the regularized system.
///   u: explicit upwind haptotaxis, then implicit diffusion of (d u) by one
///      tridiagonal solve; the new u is assembled from the face fluxes so the
///      mass telescopes exactly.
///   w: semi-implicit absorption w / (1 + dt u g(w)/w) combined with the
///      eps-diffusion (explicit or linearly implicit, see WDiffusion).
/// Throws SolverError on a failed solve or a non-finite value.
SimState step(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g, double dt,
              const SolverParams& params = {});

/// cfl_safety * min{h / max_i adv_i, [explicit w] h^2 sqrt(ug w_min)/(2 eps d_max), dt_max},
/// with adv_i = d_i times the outflow face speeds of cell i.
double stable_dt(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g, const SolverParams& params);

struct Snapshot {
  double t = 0.0;
  ScalarField u;
  ScalarField w;
};

struct RunSetup {
  FamilySlice slice;
  AbsorptionSpec g = AbsorptionSpec::linear();
  ScalarField u0;
  SolverParams params;
  double m_bound = 0.0;  // ||w0||_inf + 1 for the energy source; 0 means derive from w0eps
  std::function<void(const Snapshot&)> on_snapshot;  // called instead of storing when set
  std::function<void(const DiagnosticsRecord&)> on_record;  // called for every record as it is taken
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  SimState final_state;
  Accumulators accumulators;
  double m_bound = 0.0;
  bool stopped_steady = false;
};

/// Advances to t_end, recording diagnostics at every multiple of
/// sample_interval (and at t_end) and snapshots at the requested times; time
/// steps are shortened to land on those instants exactly.
Trajectory run(const RunSetup& setup);

}  // namespace myopic

#endif
