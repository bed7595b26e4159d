#include "myopic/regularize.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <string>

#include "myopic/errors.hh"
#include "myopic/model.hh"

namespace myopic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxHalvings = 200;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

// Midpoint nodes of the unit bump on (-1, 1) with weights summing to one.
struct Mollifier {
  std::vector<double> nodes;
  std::vector<double> weights;

  Mollifier() {
    const int m = kMollifierNodes;
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
      const double t = -1.0 + (k + 0.5) * 2.0 / m;
      nodes.push_back(t);
      weights.push_back(bump(t));
      total += weights.back();
    }
    for (double& w : weights) w /= total;
  }
};

const Mollifier& mollifier() {
  static const Mollifier m;
  return m;
}

// Working points y_{-1}, y_0, ..., y_{M-1}, y_M: the working centers plus one
// ghost on each side, so centered differences exist at every working center.
std::vector<double> extended_points(const SpatialGrid& work) {
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(work.size()) + 2);
  y.push_back(work.left() - 0.5 * work.h());
  for (double c : work.centers()) y.push_back(c);
  y.push_back(work.right() + 0.5 * work.h());
  return y;
}

std::vector<double> centered(const std::vector<double>& ext, double h) {
  std::vector<double> dx(ext.size() - 2);
  for (std::size_t k = 0; k < dx.size(); ++k) dx[k] = (ext[k + 2] - ext[k]) / (2.0 * h);
  return dx;
}

class Squeeze {
 public:
  Squeeze(const CoefficientSpec& d, double a, double b, double delta)
      : d_(d), a_(a), b_(b), c_(0.5 * (a + b)), delta_(delta), da_(d.value(a)), db_(d.value(b)) {}

  double operator()(double x) const {
    const double y = c_ + (1.0 + delta_) * (x - c_);
    if (y <= a_) return da_;
    if (y >= b_) return db_;
    return d_.value(y);
  }

 private:
  const CoefficientSpec& d_;
  double a_, b_, c_, delta_, da_, db_;
};

double mollified(const Squeeze& psi, double eta, double x) {
  const Mollifier& m = mollifier();
  double s = 0.0;
  for (std::size_t k = 0; k < m.nodes.size(); ++k) s += m.weights[k] * psi(x - eta * m.nodes[k]);
  return s;
}

// Compact exhaustion of {d > 0}: d >= 1/j, at distance (b-a)/(4j) from the ends.
std::vector<bool> compact_mask(const CoefficientSpec& d, const SpatialGrid& work, int j) {
  const double margin = work.length() / (4.0 * j);
  std::vector<bool> mask(static_cast<std::size_t>(work.size()));
  for (int k = 0; k < work.size(); ++k) {
    const double x = work.center(k);
    mask[static_cast<std::size_t>(k)] =
        x >= work.left() + margin && x <= work.right() - margin && d.value(x) >= 1.0 / j;
  }
  return mask;
}

double sup_diff(const std::vector<double>& p, const std::vector<double>& q, std::size_t offset = 0) {
  double s = 0.0;
  for (std::size_t k = 0; k + 2 * offset < p.size(); ++k) s = std::max(s, std::abs(p[k + offset] - q[k + offset]));
  return s;
}

double sup_diff_on(const std::vector<double>& p, const std::vector<double>& q, const std::vector<bool>& mask) {
  double s = 0.0;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k]) s = std::max(s, std::abs(p[k] - q[k]));
  return s;
}

// Largest x in [0, hi] with pred(x), assuming pred holds near 0. Returns 0 when
// pred fails for every bisection point.
template <class Pred>
double largest_admissible(double hi, Pred pred) {
  if (pred(hi)) return hi;
  double lo = 0.0;
  for (int it = 0; it < kBisectionSteps; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

DEpsMember build_d_eps(const CoefficientSpec& d, const GridPtr& grid, int j) {
  if (j < 1) throw DomainError("build_d_eps: j must be >= 1, got " + std::to_string(j));
  const SpatialGrid work = grid->refined(kWorkingRefinement);
  const double a = work.left();
  const double b = work.right();
  const double hw = work.h();
  const double tol = 0.5 * std::pow(3.0, -j);
  const double dtol = 0.5 / j;
  const std::vector<double> y = extended_points(work);
  const std::vector<bool> mask = compact_mask(d, work, j);

  // d on the extended points; ghosts take the end values (only interior
  // entries of its difference quotient are ever compared).
  std::vector<double> d_ext(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) d_ext[k] = d.value(std::clamp(y[k], a, b));
  const std::vector<double> d_dx = centered(d_ext, hw);

  auto sample_squeeze = [&](double delta) {
    const Squeeze psi(d, a, b, delta);
    std::vector<double> v(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) v[k] = psi(y[k]);
    return v;
  };

  // (i) squeeze
  double squeeze_err = 0.0;
  auto squeeze_ok = [&](double delta) {
    const std::vector<double> v = sample_squeeze(delta);
    const double err = sup_diff(v, d_ext, 1);
    if (err > tol) return false;
    if (sup_diff_on(centered(v, hw), d_dx, mask) > dtol) return false;
    return true;
  };
  const double delta = largest_admissible(1.0 - 1e-12, squeeze_ok);
  if (delta <= 0.0) {
    const std::vector<double> v = sample_squeeze(std::ldexp(1.0, -kBisectionSteps));
    throw RegularizationError("build_d_eps: squeeze tolerance " + fmt(tol) + " not met at j=" + std::to_string(j) +
                              " within " + std::to_string(kBisectionSteps) +
                              " bisection steps (achieved error " + fmt(sup_diff(v, d_ext, 1)) + ")");
  }
  const std::vector<double> psi_ext = sample_squeeze(delta);
  const std::vector<double> psi_dx = centered(psi_ext, hw);
  for (std::size_t k = 1; k + 1 < psi_ext.size(); ++k)
    squeeze_err = std::max(squeeze_err, std::abs(psi_ext[k] - d_ext[k]));

  // (ii) mollification; the radius must stay below delta R/(1+delta), R the
  // half-length of the domain, so the clamped plateaus cover the support at the ends.
  const Squeeze psi(d, a, b, delta);
  const double eta_cap = delta * 0.5 * (b - a) / (1.0 + delta);
  auto sample_conv = [&](double eta) {
    std::vector<double> v(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) v[k] = mollified(psi, eta, y[k]);
    return v;
  };
  auto conv_ok = [&](double eta) {
    const std::vector<double> v = sample_conv(eta);
    if (sup_diff(v, psi_ext, 1) > tol) return false;
    if (sup_diff_on(centered(v, hw), psi_dx, mask) > dtol) return false;
    return true;
  };
  const double eta = largest_admissible(eta_cap * (1.0 - 1e-9), conv_ok);
  if (eta <= 0.0) {
    const std::vector<double> v = sample_conv(eta_cap * std::ldexp(1.0, -kBisectionSteps));
    throw RegularizationError("build_d_eps: mollification tolerance " + fmt(tol) + " not met at j=" +
                              std::to_string(j) + " within " + std::to_string(kBisectionSteps) +
                              " bisection steps (achieved error " + fmt(sup_diff(v, psi_ext, 1)) + ")");
  }
  std::vector<double> phi_ext = sample_conv(eta);
  double moll_err = sup_diff(phi_ext, psi_ext, 1);

  // (iii) lift
  const double lift = 2.0 * std::pow(3.0, -j);
  for (double& v : phi_ext) v += lift;

  DEpsMember out;
  out.j = j;
  out.delta = delta;
  out.eta = eta;
  out.squeeze_error = squeeze_err;
  out.mollify_error = moll_err;
  out.work_values.assign(phi_ext.begin() + 1, phi_ext.end() - 1);
  out.work_dx = centered(phi_ext, hw);
  out.endpoint_dx_left = (mollified(psi, eta, a + hw) - mollified(psi, eta, a - hw)) / (2.0 * hw);
  out.endpoint_dx_right = (mollified(psi, eta, b + hw) - mollified(psi, eta, b - hw)) / (2.0 * hw);

  const int n = grid->size();
  std::vector<double> f(static_cast<std::size_t>(n)), fx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(kWorkingRefinement * i + kWorkingRefinement / 2);
    f[static_cast<std::size_t>(i)] = out.work_values[k];
    fx[static_cast<std::size_t>(i)] = out.work_dx[k];
  }
  out.field = ScalarField(grid, std::move(f));
  out.derivative = ScalarField(grid, std::move(fx));
  return out;
}

double ramp_factor(const std::vector<RampInterval>& intervals, double x) {
  for (const RampInterval& r : intervals) {
    const bool inside = (x > r.a || (x == r.a && !r.left_degenerate)) && (x < r.b || (x == r.b && !r.right_degenerate));
    if (!inside) continue;
    if (!r.included) return 0.0;
    double z = 1.0;
    if (r.left_degenerate) z = std::min(z, std::clamp((x - r.a - r.delta) / r.delta, 0.0, 1.0));
    if (r.right_degenerate) z = std::min(z, std::clamp((r.b - r.delta - x) / r.delta, 0.0, 1.0));
    return z;
  }
  return 0.0;
}

W0jMember build_w0j(const Profile& w0, const CoefficientSpec& d, const GridPtr& grid, int j) {
  if (j < 1) throw DomainError("build_w0j: j must be >= 1, got " + std::to_string(j));
  const double a = grid->left();
  const double b = grid->right();
  std::vector<double> cuts{a};
  for (double z : d.zeros_in(a, b))
    if (z > cuts.back()) cuts.push_back(z);
  if (cuts.back() < b) cuts.push_back(b);

  W0jMember out;
  out.j = j;
  int index = 0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    RampInterval r;
    r.a = cuts[s];
    r.b = cuts[s + 1];
    if (r.b - r.a <= 0.0) continue;
    r.left_degenerate = d.value(r.a) == 0.0;
    r.right_degenerate = d.value(r.b) == 0.0;
    r.index = ++index;
    int cells = 0;
    for (double c : grid->centers())
      if (c > r.a && c < r.b) ++cells;
    if (cells < 4)
      throw RegularizationError("build_w0j: interval (" + fmt(r.a) + ", " + fmt(r.b) + ") of {d>0} spans only " +
                                std::to_string(cells) + " cells (need 4)");
    const double level = std::ldexp(1.0, -r.index);
    auto small_enough = [&](double delta) {
      if (r.left_degenerate && d.sup_on(r.a, r.a + 2.0 * delta) > level) return false;
      if (r.right_degenerate && d.sup_on(r.b - 2.0 * delta, r.b) > level) return false;
      return true;
    };
    const double cap = std::min((r.b - r.a) / 4.0, 1.0 / j);
    r.delta = largest_admissible(cap, small_enough);
    if (r.delta <= 0.0)
      throw RegularizationError("build_w0j: no admissible ramp width on interval " + std::to_string(r.index));
    r.included = r.index <= j;
    out.intervals.push_back(r);
  }

  auto value = [&](double x) {
    const double z = ramp_factor(out.intervals, x);
    return z * z * w0(x);
  };
  const SpatialGrid work = grid->refined(kWorkingRefinement);
  out.work_values.reserve(static_cast<std::size_t>(work.size()));
  for (double x : work.centers()) out.work_values.push_back(value(x));
  out.field = ScalarField::sample(grid, value);
  return out;
}

namespace {

// Integral of phi (sqrt(w))_x^2 * 4 over working faces, i.e. the face form of
// int phi w_x^2 / w; boundary faces carry no flux.
double gradient_energy(const std::vector<double>& phi, const std::vector<double>& w, double h) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    const double g = (std::sqrt(w[k + 1]) - std::sqrt(w[k])) / h;
    s += 0.5 * (phi[k] + phi[k + 1]) * 4.0 * g * g * h;
  }
  return s;
}

double weighted_mass(const std::vector<double>& phi, const std::vector<double>& phix, const std::vector<double>& w,
                     double h) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += phix[k] * phix[k] / phi[k] * w[k] * h;
  return s;
}

std::vector<double> shifted(const std::vector<double>& w, double s) {
  std::vector<double> out(w);
  for (double& v : out) v += s;
  return out;
}

double inv_or_inf(double integral, double power) { return integral > 0.0 ? std::pow(integral, power) : kInf; }

}  // namespace

EpsilonSelection select_epsilons(const std::vector<DEpsMember>& phis, const std::vector<W0jMember>& w0js,
                                 const CoefficientSpec& d, const Profile& w0, const SpatialGrid& grid, int j_max) {
  if (j_max < 1 || static_cast<int>(phis.size()) < j_max || static_cast<int>(w0js.size()) < j_max)
    throw DomainError("select_epsilons: members for j = 1.." + std::to_string(j_max) + " required");
  const SpatialGrid work = grid.refined(kWorkingRefinement);
  const double hw = work.h();

  std::vector<double> d_work;
  for (double x : work.centers()) d_work.push_back(d.value(x));

  EpsilonSelection sel;
  for (int j = 1; j <= j_max; ++j)
    sel.c1 = std::max(sel.c1, gradient_energy(d_work, w0js[static_cast<std::size_t>(j - 1)].work_values, hw));
  auto weight = [&](double x) {
    const CoefficientValue v = d.eval(x);
    if (!v.dx || v.d <= 0.0) return 0.0;
    return *v.dx * *v.dx / v.d * w0(x);
  };
  sel.c2 = refined_midpoint(weight, grid.left(), grid.right(), d.zeros_in(grid.left(), grid.right()),
                            kHypothesisQuadratureCells)
               .value;
  const double target1 = sel.c1 + 1.0;
  const double target2 = sel.c2 + 1.0 + std::sqrt(grid.length());

  double prev = 1.0;
  for (int j = 1; j <= j_max; ++j) {
    const DEpsMember& phi = phis[static_cast<std::size_t>(j - 1)];
    const std::vector<double>& w = w0js[static_cast<std::size_t>(j - 1)].work_values;
    EpsilonTerms t;
    t.j = j;
    t.halving = prev / 2.0;
    t.power = std::pow(3.0, -4.0 * j);
    double i3 = 0.0, i4 = 0.0, ratio = 0.0;
    for (std::size_t k = 0; k < phi.work_values.size(); ++k) {
      const double p = phi.work_values[k];
      const double px = phi.work_dx[k];
      i3 += px * px / (p * p * p) * hw;
      i4 += px * px * px * px / (p * p) * hw;
      ratio = std::max(ratio, std::abs(px / p));
    }
    t.inv_d3 = inv_or_inf(i3, -0.5);
    t.inv_d4 = inv_or_inf(i4, -2.0);
    t.ratio_sup = inv_or_inf(ratio, -4.0);
    t.reciprocal_j = 1.0 / j;

    // Halve from 1 until the bound holds; a bound that no halving reaches (the
    // member phi_j is fixed, so the limit is the shift-free value) is non-binding.
    auto halve = [&](auto value_at, double target) {
      double eps = 1.0;
      for (int k = 0; k <= kMaxHalvings; ++k, eps *= 0.5)
        if (value_at(eps) <= target) return eps;
      return kInf;
    };
    t.eps1 = halve([&](double e) { return gradient_energy(phi.work_values, shifted(w, std::pow(e, 0.25)), hw); },
                   target1);
    t.eps2 = halve(
        [&](double e) { return weighted_mass(phi.work_values, phi.work_dx, shifted(w, std::pow(e, 0.25)), hw); },
        target2);
    t.value = std::min({t.halving, t.power, t.inv_d3, t.inv_d4, t.ratio_sup, t.eps1, t.eps2, t.reciprocal_j});
    prev = t.value;
    sel.terms.push_back(t);
  }
  return sel;
}

RegularizationFamily RegularizationFamily::build(const CoefficientSpec& d, const Profile& w0, GridPtr grid, int j_max,
                                                 int workers) {
  if (j_max < 1) throw DomainError("RegularizationFamily: j_max must be >= 1");
  RegularizationFamily fam(d, grid);
  fam.phis_.resize(static_cast<std::size_t>(j_max));
  fam.w0js_.resize(static_cast<std::size_t>(j_max));
  auto build_one = [&](int j) {
    fam.phis_[static_cast<std::size_t>(j - 1)] = build_d_eps(d, grid, j);
    fam.w0js_[static_cast<std::size_t>(j - 1)] = build_w0j(w0, d, grid, j);
  };
  if (workers <= 1) {
    for (int j = 1; j <= j_max; ++j) build_one(j);
  } else {
    for (int first = 1; first <= j_max; first += workers) {
      std::vector<std::future<void>> batch;
      for (int j = first; j < first + workers && j <= j_max; ++j)
        batch.push_back(std::async(std::launch::async, build_one, j));
      for (auto& f : batch) f.get();
    }
  }
  fam.selection_ = select_epsilons(fam.phis_, fam.w0js_, d, w0, *grid, j_max);
  for (const EpsilonTerms& t : fam.selection_.terms) fam.epsilons_.push_back(t.value);
  fam.ledger_ = compute_ledger(fam);
  return fam;
}

ScalarField RegularizationFamily::w0eps(int j) const {
  const double shift = std::pow(eps(j), 0.25);
  ScalarField out = w0j(j).field;
  for (int i = 0; i < out.size(); ++i) out[i] += shift;
  return out;
}

FamilySlice RegularizationFamily::slice(int j) const {
  if (j < 1 || j > j_max())
    throw DomainError("family index j=" + std::to_string(j) + " outside 1.." + std::to_string(j_max()));
  return FamilySlice{j, eps(j), d_eps(j).field, d_eps(j).derivative, w0eps(j)};
}

FamilySlice RegularizationFamily::slice_for_eps(double e) const {
  if (!(e > 0.0 && e < 1.0)) throw DomainError("eps override must lie in (0,1), got " + fmt(e));
  int j = 1;
  for (int k = 1; k <= j_max(); ++k)
    if (e <= eps(k)) j = k;
  FamilySlice s = slice(j);
  s.eps = e;
  const double shift = std::pow(e, 0.25);
  s.w0eps = w0j(j).field;
  for (int i = 0; i < s.w0eps.size(); ++i) s.w0eps[i] += shift;
  return s;
}

PropertyLedger compute_ledger(const RegularizationFamily& family) {
  const SpatialGrid work = family.grid().refined(kWorkingRefinement);
  const double hw = work.h();
  const CoefficientSpec& d = family.coefficient();
  std::vector<double> d_work;
  for (double x : work.centers()) d_work.push_back(d.value(x));
  const std::vector<double>& sim = family.grid().centers();

  PropertyLedger led;
  for (int j = 1; j <= family.j_max(); ++j) {
    const DEpsMember& phi = family.d_eps(j);
    const double e = family.eps(j);
    const double q = std::pow(e, 0.25);
    LedgerRow row;
    row.j = j;
    row.eps = e;
    double i3 = 0.0, i4 = 0.0, ratio = 0.0, mn = kInf;
    for (std::size_t k = 0; k < phi.work_values.size(); ++k) {
      const double p = phi.work_values[k];
      const double px = phi.work_dx[k];
      i3 += px * px / (p * p * p) * hw;
      i4 += px * px * px * px / (p * p) * hw;
      ratio = std::max(ratio, std::abs(px / p));
      mn = std::min(mn, p);
      row.sup_distance = std::max(row.sup_distance, std::abs(p - d_work[k]));
    }
    row.grad_sq_cubed = e * e * i3;
    row.grad_quartic = std::sqrt(e) * i4;
    row.floor_ratio = q / mn;
    row.log_slope = q * ratio;
    const std::vector<double> w = shifted(family.w0j(j).work_values, q);
    row.w0_gradient_energy = gradient_energy(phi.work_values, w, hw);
    row.w0_weighted_mass = weighted_mass(phi.work_values, phi.work_dx, w, hw);
    led.max_w0_gradient_energy = std::max(led.max_w0_gradient_energy, row.w0_gradient_energy);
    led.max_w0_weighted_mass = std::max(led.max_w0_weighted_mass, row.w0_weighted_mass);

    const double lo = std::pow(3.0, -j);
    for (std::size_t i = 0; i < sim.size(); ++i) {
      const double v = phi.field[static_cast<int>(i)];
      const double dv = d.value(sim[i]);
      if (v < dv + lo * (1.0 - 1e-12) || v > dv + 3.0 * lo * (1.0 + 1e-12)) led.sandwich = false;
      if (j > 1) {
        const double excess = v - family.d_eps(j - 1).field[static_cast<int>(i)];
        led.worst_monotone_excess = std::max(led.worst_monotone_excess, excess);
        if (excess > 0.0) led.monotone = false;
      }
    }
    led.rows.push_back(row);
  }
  return led;
}

PropertyLedger verify_family(const RegularizationFamily& family) {
  PropertyLedger led = compute_ledger(family);
  constexpr double bound = 1.0 + 1e-9;
  for (const LedgerRow& r : led.rows) {
    const std::pair<const char*, double> cols[] = {
        {"eps^2 int d_x^2/d^3", r.grad_sq_cubed},
        {"sqrt(eps) int d_x^4/d^2", r.grad_quartic},
        {"eps^(1/4)/min d", r.floor_ratio},
        {"eps^(1/4) sup|d_x/d|", r.log_slope}};
    for (const auto& [name, v] : cols)
      if (!(v <= bound))
        throw RegularizationError("verify_family: bound " + std::string(name) + " violated at j=" +
                                  std::to_string(r.j) + " (value " + fmt(v) + ")");
  }
  if (!led.monotone)
    throw RegularizationError("verify_family: d_eps not monotone in j (excess " + fmt(led.worst_monotone_excess) +
                              ")");
  if (!led.sandwich) throw RegularizationError("verify_family: sandwich d + 3^-j <= d_eps <= d + 3 3^-j violated");
  return led;
}

}  // namespace myopic
