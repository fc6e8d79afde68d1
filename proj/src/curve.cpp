#include "blowup/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "blowup/fit.hpp"
#include "blowup/selfsim.hpp"
#include "blowup/stationary.hpp"

namespace blowup {

std::vector<const CurvePoint*> BlowupCurve::valid_points() const {
  std::vector<const CurvePoint*> out;
  for (const CurvePoint& pt : points) {
    if (pt.valid()) out.push_back(&pt);
  }
  return out;
}

namespace {

void require_increasing(std::span<const double> x, const char* what) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      fail(ErrorKind::invalid_data, std::string(what) + ": x must be strictly increasing");
    }
  }
}

void unwrap_into(BlowupCurve& curve) {
  std::vector<CurvePoint*> with_phase;
  std::vector<double> raw;
  for (CurvePoint& pt : curve.points) {
    if (pt.valid() && std::isfinite(pt.theta_raw)) {
      with_phase.push_back(&pt);
      raw.push_back(pt.theta_raw);
    }
  }
  const Unwrapped u = phase_unwrap(raw);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    with_phase[i]->theta_unwrapped = u.values[i];
    if (u.ambiguous[i]) curve.phase_ambiguous = true;
  }
}

std::string describe(const char* head, double a, double b) {
  std::ostringstream os;
  os.precision(6);
  os << head << " [" << a << ", " << b << "]";
  return os.str();
}

std::size_t nearest_valid(const BlowupCurve& curve, double x0) {
  std::size_t best = curve.points.size();
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (!curve.points[i].valid()) continue;
    if (best == curve.points.size() || std::abs(curve.points[i].x - x0) < std::abs(curve.points[best].x - x0)) best = i;
  }
  if (best == curve.points.size()) fail(ErrorKind::insufficient_data, "curve has no valid points");
  return best;
}

}  // namespace

BlowupCurve make_curve(std::span<const double> x, std::span<const double> T, std::span<const double> d,
                       std::span<const double> theta) {
  require_size(T.size(), x.size(), "make_curve T");
  if (!d.empty()) require_size(d.size(), x.size(), "make_curve d");
  if (!theta.empty()) require_size(theta.size(), x.size(), "make_curve theta");
  require_increasing(x, "make_curve");
  BlowupCurve c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    CurvePoint pt;
    pt.x = x[i];
    pt.T = T[i];
    if (!d.empty()) pt.d = d[i];
    if (!theta.empty()) pt.theta_raw = std::remainder(theta[i], 2.0 * std::numbers::pi);
    pt.converged = true;
    c.points.push_back(pt);
  }
  unwrap_into(c);
  return c;
}

BlowupCurve scan_curve(const WaveState& initial, const PowerParam& p, const CurveOptions& opt) {
  if (opt.xs.empty()) fail(ErrorKind::config, "scan_curve: no scan points");
  require_increasing(opt.xs, "scan_curve");
  const Grid1D& grid = initial.grid;
  const CylinderGrid cyl(opt.m, p);

  BlowupCurve curve;
  curve.grid = grid;
  curve.p = p.p();
  curve.m = opt.m;

  // pass 1: traces and blow-up times
  EvolveOptions e1 = opt.evolve;
  e1.mode = StopMode::masked;
  e1.probes = opt.xs;
  e1.capture_times.clear();
  e1.snapshot_stride = 0;
  const EvolveResult run1 = evolve(initial, p, e1);
  for (std::size_t i = 1; i < run1.traces.size(); ++i) {
    if (run1.traces[i].node == run1.traces[i - 1].node) {
      fail(ErrorKind::config, "scan_curve: two scan points snap to the same grid node");
    }
  }

  const double lead = std::max(opt.min_cone_cells * grid.dx(), std::pow(kappa0(p) / opt.capture_cap, 0.5 * (p.p() - 1.0)));
  std::vector<double> capture_times;
  std::vector<std::size_t> capture_owner;
  for (const PointTrace& tr : run1.traces) {
    CurvePoint pt;
    pt.x = tr.x0;
    try {
      const TimeEstimate est = estimate_T(tr, p, opt.estimate);
      pt.T = est.T_hat;
      pt.r2_T = est.r2;
    } catch (const Error& err) {
      pt.skip_reason = std::string("no blow-up time: ") + err.what();
    }
    if (pt.valid() && (pt.x - pt.T < grid.xmin() || pt.x + pt.T > grid.xmax())) {
      pt.skip_reason = describe("backward cone leaves the domain:", pt.x - pt.T, pt.x + pt.T);
    }
    if (pt.valid() && pt.T - lead <= initial.t) {
      pt.skip_reason = "blow-up time closer to the initial time than the capture lead";
    }
    if (pt.valid()) {
      capture_times.push_back(pt.T - lead);
      capture_owner.push_back(curve.points.size());
    }
    curve.points.push_back(pt);
  }
  if (capture_times.empty()) return curve;

  // pass 2: identical run, stopped at the last capture
  EvolveOptions e2 = e1;
  e2.probes.clear();
  e2.capture_times = capture_times;
  e2.t_end = *std::max_element(capture_times.begin(), capture_times.end());
  const EvolveResult run2 = evolve(initial, p, e2);

  const auto count = static_cast<std::ptrdiff_t>(capture_owner.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    CurvePoint& pt = curve.points[capture_owner[static_cast<std::size_t>(k)]];
    const std::optional<WaveState>& cap = run2.captures[static_cast<std::size_t>(k)];
    if (!cap) {
      pt.skip_reason = "no state stored before the capture time";
      continue;
    }
    const double half = pt.T - cap->t;
    bool frozen = false;
    for (std::size_t i = 0; i < grid.n() && !run2.freeze_time.empty(); ++i) {
      if (std::abs(grid.x(i) - pt.x) <= half + 2.0 * grid.dx() && run2.freeze_time[i] <= cap->t) frozen = true;
    }
    if (frozen) {
      pt.skip_reason = "frozen nodes inside the capture cone";
      continue;
    }
    try {
      const SelfSimState st = to_selfsimilar(*cap, pt.x, pt.T, cyl);
      const ProfileFit fit = fit_profile(st, opt.fit);
      pt.d = fit.d;
      pt.theta_raw = fit.theta;
      pt.residual = fit.residual;
      pt.s = fit.s;
      pt.converged = fit.converged;
    } catch (const Error& err) {
      pt.skip_reason = std::string("self-similar fit failed: ") + err.what();
    }
  }
  unwrap_into(curve);
  return curve;
}

DerivativeCheck check_derivative(const BlowupCurve& curve) {
  const std::size_t n = curve.points.size();
  DerivativeCheck out;
  out.gap.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.slope.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::size_t used = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const CurvePoint& l = curve.points[i - 1];
    const CurvePoint& c = curve.points[i];
    const CurvePoint& r = curve.points[i + 1];
    if (!l.valid() || !c.valid() || !r.valid()) continue;
    out.slope[i] = (r.T - l.T) / (r.x - l.x);
    if (!std::isfinite(c.d)) continue;
    out.gap[i] = std::abs(out.slope[i] - c.d);
    out.max_gap = std::max(out.max_gap, out.gap[i]);
    ++used;
  }
  if (used == 0) fail(ErrorKind::insufficient_data, "check_derivative: needs three consecutive valid points");
  return out;
}

bool noncharacteristic_test(const BlowupCurve& curve, double x0, double delta, double window) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::domain, "noncharacteristic_test: delta must lie in (0, 1)");
  const CurvePoint& c = curve.points[nearest_valid(curve, x0)];
  for (const CurvePoint* pt : curve.valid_points()) {
    const double r = std::abs(pt->x - c.x);
    if (r > window) continue;
    if (pt->T < c.T - delta * r) return false;
  }
  return true;
}

SlopeBound slope_bound_check(const BlowupCurve& curve, double x0, double eta) {
  if (!(eta > 0.0)) fail(ErrorKind::domain, "slope_bound_check: eta must be positive");
  const CurvePoint& c = curve.points[nearest_valid(curve, x0)];
  if (!std::isfinite(c.d)) fail(ErrorKind::invalid_data, "slope_bound_check: d(x0) is not available");
  std::vector<const CurvePoint*> win;
  for (const CurvePoint* pt : curve.valid_points()) {
    if (std::abs(pt->x - c.x) <= eta) win.push_back(pt);
  }
  if (win.size() < 2) fail(ErrorKind::insufficient_data, "slope_bound_check: fewer than two points in the window");
  SlopeBound out;
  for (std::size_t i = 0; i < win.size(); ++i) {
    for (std::size_t j = i + 1; j < win.size(); ++j) {
      out.worst_slope = std::max(out.worst_slope, std::abs(win[j]->T - win[i]->T) / (win[j]->x - win[i]->x));
    }
  }
  out.bound = 0.5 * (1.0 + std::abs(c.d));
  out.bound_loose = 1.0 + std::abs(c.d);
  out.ratio = out.worst_slope / out.bound;
  out.ratio_loose = out.worst_slope / out.bound_loose;
  out.ok = out.worst_slope <= out.bound;
  out.ok_loose = out.worst_slope <= out.bound_loose;
  return out;
}

double lipschitz_ratio(const BlowupCurve& curve) {
  const auto v = curve.valid_points();
  double worst = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, std::abs(v[i]->T - v[i - 1]->T) / (v[i]->x - v[i - 1]->x));
  return worst;
}

HolderEstimate holder_exponent(std::span<const double> x, std::span<const double> f, double x0,
                               const HolderOptions& opt) {
  require_size(f.size(), x.size(), "holder_exponent f");
  require_increasing(x, "holder_exponent");
  const auto it = std::find(x.begin(), x.end(), x0);
  if (it == x.end()) fail(ErrorKind::invalid_data, "holder_exponent: x0 is not a sample point");
  const std::size_t i0 = static_cast<std::size_t>(it - x.begin());
  const double floor = std::max(opt.noise_floor, 0.0);

  HolderEstimate out;
  out.x0 = x0;
  std::vector<double> lr, lf;
  std::size_t in_window = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == i0) continue;
    const double r = std::abs(x[i] - x0);
    if (r < opt.r_min || r > opt.r_max) continue;
    if (!std::isfinite(f[i])) fail(ErrorKind::invalid_data, "holder_exponent: non-finite sample");
    ++in_window;
    const double df = std::abs(f[i] - f[i0]);
    if (!(df > floor)) continue;
    lr.push_back(std::log(r));
    lf.push_back(std::log(df));
    out.r_lo = lr.size() == 1 ? r : std::min(out.r_lo, r);
    out.r_hi = std::max(out.r_hi, r);
  }
  if (in_window == 0) fail(ErrorKind::insufficient_data, "holder_exponent: no pairs in the window");
  if (lr.empty()) {
    out.flat = true;
    return out;
  }
  if (lr.size() < opt.min_pairs) fail(ErrorKind::insufficient_data, "holder_exponent: too few pairs above the noise floor");
  const LineFit line = fit_line(lr, lf);
  out.exponent = line.slope;
  out.constant = std::exp(line.intercept);
  out.r2 = line.r2;
  out.used = lr.size();
  return out;
}

const char* to_string(HolderField field) { return field == HolderField::theta ? "theta" : "T_prime"; }

HolderEstimate curve_holder(const BlowupCurve& curve, HolderField field, double x0, HolderOptions opt) {
  std::vector<double> xs, fs, res;
  if (field == HolderField::theta) {
    for (const CurvePoint* pt : curve.valid_points()) {
      if (!std::isfinite(pt->theta_unwrapped)) continue;
      xs.push_back(pt->x);
      fs.push_back(pt->theta_unwrapped);
      res.push_back(pt->residual);
    }
  } else {
    const DerivativeCheck dc = check_derivative(curve);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      if (!std::isfinite(dc.slope[i])) continue;
      xs.push_back(curve.points[i].x);
      fs.push_back(dc.slope[i]);
      res.push_back(curve.points[i].residual);
    }
  }
  if (xs.empty()) fail(ErrorKind::insufficient_data, "curve_holder: field has no samples");
  if (opt.noise_floor < 0.0) {
    std::vector<double> finite;
    for (double r : res) {
      if (std::isfinite(r)) finite.push_back(r);
    }
    double med = 0.0;
    if (!finite.empty()) {
      std::nth_element(finite.begin(), finite.begin() + static_cast<std::ptrdiff_t>(finite.size() / 2), finite.end());
      med = finite[finite.size() / 2];
    }
    opt.noise_floor = 10.0 * med;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::abs(xs[i] - x0) < std::abs(xs[best] - x0)) best = i;
  }
  return holder_exponent(xs, fs, xs[best], opt);
}

Unwrapped phase_unwrap(std::span<const double> thetas, double band) {
  Unwrapped out;
  out.values.reserve(thetas.size());
  out.ambiguous.assign(thetas.size(), false);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (i == 0) {
      out.values.push_back(thetas[0]);
      continue;
    }
    const double raw = thetas[i] - thetas[i - 1];
    double gap = std::remainder(raw, 2.0 * std::numbers::pi);
    if (std::abs(std::abs(gap) - std::numbers::pi) < band) {
      out.ambiguous[i] = true;
      gap = raw;
    }
    out.values.push_back(out.values.back() + gap);
  }
  return out;
}

}  // namespace blowup
