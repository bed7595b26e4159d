#include "myopic/solver.hh"

#include <algorithm>
#include <cmath>
#include <limits>

#include "myopic/errors.hh"

namespace myopic {

namespace {

// Thomas algorithm for a tridiagonal system; lower[0] and upper[n-1] are unused.
// Returns false on a vanishing pivot.
bool solve_tridiagonal(const std::vector<double>& lower, std::vector<double> diag, const std::vector<double>& upper,
                       std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) return false;
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) return false;
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  return true;
}

double residual_norm(const std::vector<double>& lower, const std::vector<double>& diag,
                     const std::vector<double>& upper, const std::vector<double>& x, const std::vector<double>& b) {
  const std::size_t n = diag.size();
  double r = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ax = diag[i] * x[i];
    if (i > 0) ax += lower[i] * x[i - 1];
    if (i + 1 < n) ax += upper[i] * x[i + 1];
    r = std::max(r, std::abs(ax - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0.0 ? r / scale : r;
}

// Face coefficients d/sqrt(g(w)) at interior faces 1..n-1 (index f is the face
// between cells f-1 and f); boundary faces carry zero.
std::vector<double> w_face_coefficients(const ScalarField& w, const ScalarField& d, const AbsorptionSpec& g) {
  const int n = w.size();
  std::vector<double> k(static_cast<std::size_t>(n) + 1, 0.0);
  for (int f = 1; f < n; ++f) {
    const double wf = 0.5 * (w[f - 1] + w[f]);
    k[static_cast<std::size_t>(f)] = 0.5 * (d[f - 1] + d[f]) / std::sqrt(g.g(wf));
  }
  return k;
}

}  // namespace

SimState step(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g, double dt,
              const SolverParams& params) {
  if (!(dt > 0.0)) throw SolverError("nonpositive time step", s.step_count, s.t);
  const int n = s.u.size();
  const auto nz = static_cast<std::size_t>(n);
  const double h = s.u.grid().h();
  const ScalarField& d = slice.d_eps;

  // Explicit upwind haptotactic flux A at interior faces.
  std::vector<double> adv(nz + 1, 0.0);
  for (int f = 1; f < n; ++f) {
    const double gw = (s.w[f] - s.w[f - 1]) / h;
    const int up = gw > 0.0 ? f - 1 : f;
    adv[static_cast<std::size_t>(f)] = d[up] * s.u[up] * gw;
  }
  std::vector<double> ustar(nz);
  for (int i = 0; i < n; ++i)
    ustar[static_cast<std::size_t>(i)] =
        s.u[i] - dt / h * (adv[static_cast<std::size_t>(i) + 1] - adv[static_cast<std::size_t>(i)]);

  // Implicit diffusion in v = d u: v/d - (dt/h^2) Lap v = u*.
  const double r = dt / (h * h);
  std::vector<double> lo(nz, -r), up(nz, -r), di(nz);
  for (int i = 0; i < n; ++i) {
    const double neighbours = (i > 0 ? 1.0 : 0.0) + (i + 1 < n ? 1.0 : 0.0);
    di[static_cast<std::size_t>(i)] = 1.0 / d[i] + r * neighbours;
  }
  lo[0] = 0.0;
  up[nz - 1] = 0.0;
  std::vector<double> v = ustar;
  if (!solve_tridiagonal(lo, di, up, v)) throw SolverError("u diffusion solve: zero pivot", s.step_count, s.t);
  if (residual_norm(lo, di, up, v, ustar) > params.tol_newton)
    throw SolverError("u diffusion solve: residual above tolerance", s.step_count, s.t);

  SimState out;
  out.eps = s.eps;
  out.step_count = s.step_count + 1;
  out.t = s.t + dt;
  std::vector<double> unew(nz);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double fr = i + 1 < n ? (v[k + 1] - v[k]) / h - adv[k + 1] : 0.0;
    const double fl = i > 0 ? (v[k] - v[k - 1]) / h - adv[k] : 0.0;
    unew[k] = s.u[i] + dt / h * (fr - fl);
    if (!std::isfinite(unew[k])) throw SolverError("non-finite u", s.step_count, s.t);
  }

  // w: absorption factor and eps-diffusion.
  const std::vector<double> kf = w_face_coefficients(s.w, d, g);
  std::vector<double> absorb(nz);
  for (int i = 0; i < n; ++i) absorb[static_cast<std::size_t>(i)] = 1.0 + dt * s.u[i] * g.g_over_s(s.w[i]);
  std::vector<double> wnew(nz);
  const double re = dt * s.eps / (h * h);
  if (params.w_diffusion == WDiffusion::Explicit) {
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double right = i + 1 < n ? kf[k + 1] * (s.w[i + 1] - s.w[i]) : 0.0;
      const double left = i > 0 ? kf[k] * (s.w[i] - s.w[i - 1]) : 0.0;
      wnew[k] = (s.w[i] + re * (right - left)) / absorb[k];
    }
  } else {
    std::vector<double> wl(nz), wd(nz), wu(nz), rhs(nz);
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      wl[k] = -re * kf[k];
      wu[k] = -re * kf[k + 1];
      wd[k] = absorb[k] + re * (kf[k] + kf[k + 1]);
      rhs[k] = s.w[i];
    }
    wnew = rhs;
    if (!solve_tridiagonal(wl, wd, wu, wnew)) throw SolverError("w diffusion solve: zero pivot", s.step_count, s.t);
    if (residual_norm(wl, wd, wu, wnew, rhs) > params.tol_newton)
      throw SolverError("w diffusion solve: residual above tolerance", s.step_count, s.t);
  }
  for (double x : wnew)
    if (!std::isfinite(x)) throw SolverError("non-finite w", s.step_count, s.t);

  out.u = ScalarField(s.u.grid_ptr(), std::move(unew));
  out.w = ScalarField(s.w.grid_ptr(), std::move(wnew));
  return out;
}

double stable_dt(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g, const SolverParams& params) {
  const int n = s.u.size();
  const double h = s.u.grid().h();
  const ScalarField& d = slice.d_eps;
  double adv_max = 0.0;
  for (int i = 0; i < n; ++i) {
    const double right = i + 1 < n ? std::max((s.w[i + 1] - s.w[i]) / h, 0.0) : 0.0;
    const double left = i > 0 ? std::max(-(s.w[i] - s.w[i - 1]) / h, 0.0) : 0.0;
    adv_max = std::max(adv_max, d[i] * (right + left));
  }
  double dt = params.dt_max;
  if (adv_max > 0.0) dt = std::min(dt, h / adv_max);
  if (params.w_diffusion == WDiffusion::Explicit && s.eps > 0.0)
    dt = std::min(dt, h * h * std::sqrt(g.lower() * s.w.min()) / (2.0 * s.eps * d.max()));
  return params.cfl_safety * dt;
}

Trajectory run(const RunSetup& setup) {
  const SolverParams& p = setup.params;
  p.validate();
  const FamilySlice& slice = setup.slice;
  const AbsorptionSpec& g = setup.g;

  Trajectory traj;
  traj.m_bound = setup.m_bound > 0.0 ? setup.m_bound : slice.w0eps.max() - std::pow(slice.eps, 0.25) + 1.0;
  SimState s = SimState::initial(slice, setup.u0);
  const double length = s.u.grid().length();

  std::vector<double> snaps = p.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::remove_if(snaps.begin(), snaps.end(), [&](double t) { return t > p.t_end; }), snaps.end());
  std::size_t next_snap = 0;
  auto emit_snapshot = [&](const SimState& st) {
    Snapshot sn{st.t, st.u, st.w};
    if (setup.on_snapshot)
      setup.on_snapshot(sn);
    else
      traj.snapshots.push_back(std::move(sn));
  };
  while (next_snap < snaps.size() && snaps[next_snap] <= 0.0) {
    emit_snapshot(s);
    ++next_snap;
  }

  Accumulators acc;
  auto take_record = [&](const SimState& st) {
    traj.records.push_back(record(st, slice, g, acc, p.equi_delta));
    if (setup.on_record) setup.on_record(traj.records.back());
  };
  take_record(s);
  InstantRates rate = rates(s, slice, g);
  long sample_k = 1;
  int steady_count = 0;

  while (s.t < p.t_end) {
    const double next_sample = std::min(static_cast<double>(sample_k) * p.sample_interval, p.t_end);
    const double next_event = next_snap < snaps.size() ? std::min(next_sample, snaps[next_snap]) : next_sample;
    double dt = stable_dt(s, slice, g, p);
    bool landed = false;
    if (s.t + dt >= next_event - 1e-12 * std::max(1.0, next_event)) {
      dt = next_event - s.t;
      landed = true;
    }
    if (s.step_count >= p.max_steps) throw SolverError("step budget exhausted", s.step_count, s.t);
    s = step(s, slice, g, dt, p);
    if (landed) s.t = next_event;
    const InstantRates now = rates(s, slice, g);
    acc.advance(rate, now, dt);
    rate = now;
    if (!landed) continue;

    while (next_snap < snaps.size() && snaps[next_snap] <= s.t) {
      emit_snapshot(s);
      ++next_snap;
    }
    if (s.t >= next_sample) {
      if (!s.valid()) throw SolverError("positivity or finiteness lost", s.step_count, s.t);
      take_record(s);
      while (static_cast<double>(sample_k) * p.sample_interval <= s.t) ++sample_k;
      if (p.steady_tol > 0.0) {
        const DiagnosticsRecord& r = traj.records.back();
        steady_count = r.dev_L1 < p.steady_tol * r.mu * length ? steady_count + 1 : 0;
        if (steady_count >= 10) {
          traj.stopped_steady = true;
          break;
        }
      }
    }
  }
  traj.final_state = s;
  traj.accumulators = acc;
  return traj;
}

}  // namespace myopic
