#include "blowup/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "blowup/fit.hpp"
#include "blowup/stationary.hpp"

namespace blowup {

namespace {

double wrap_phase(double theta) {
  // atan2 range is [-pi, pi]; map -pi onto pi
  return theta <= -std::numbers::pi ? theta + 2.0 * std::numbers::pi : theta;
}

}  // namespace

double fit_theta(const CylinderGrid& grid, const ComplexField& w, double d) {
  const ComplexField k = kappa_field(grid, d);
  const Cplx ip = inner_rho(grid, w, k);
  const double scale = norm_L2rho(grid, w) * norm_L2rho(grid, k);
  if (!(ip.abs() > 1e-14 * scale) || !std::isfinite(ip.abs())) {
    fail(ErrorKind::undefined_phase, "fit_theta: <w, kappa(d)> vanishes, phase undefined");
  }
  return wrap_phase(ip.arg());
}

double family_distance(const SelfSimState& st, double d, double theta) {
  const ComplexField k = kappa_field(st.grid, d, theta);
  return norm_H(st.grid, st.w - k, st.ws);
}

namespace {

struct Trial {
  double d;
  double theta;
  double value;
};

Trial evaluate(const SelfSimState& st, double d) {
  double theta = 0.0;
  try {
    theta = fit_theta(st.grid, st.w, d);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::undefined_phase) throw;
  }
  return {d, theta, family_distance(st, d, theta)};
}

/// Re <a, b> in the first-component part of the energy norm.
double real_inner_H0(const CylinderGrid& grid, const ComplexField& a, const ComplexField& b) {
  const ComplexField da = derivative_y(grid, a);
  const ComplexField db = derivative_y(grid, b);
  const auto y = grid.y();
  std::vector<double> g(grid.m());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double v = a[j].re * b[j].re + a[j].im * b[j].im;
    const double dv = da[j].re * db[j].re + da[j].im * db[j].im;
    g[j] = v + dv * (1.0 - y[j]) * (1.0 + y[j]);
  }
  return quad_rho(grid, g);
}

/// Half the d-derivative of the squared phase-reduced distance, including the
/// drift of the closed-form phase with d. Its root pins d far below the
/// sqrt(eps) resolution of comparing objective values.
double reduced_slope(const SelfSimState& st, double d) {
  const CylinderGrid& g = st.grid;
  const std::size_t m = g.m();
  const auto y = g.y();
  const PowerParam& p = g.power();
  const ComplexField k = kappa_field(g, d);
  const ComplexField kd = ComplexField::generate(m, [&](std::size_t j) { return Cplx{kappa_dd(d, y[j], p), 0.0}; });
  const Cplx ip = inner_rho(g, st.w, k);
  const Cplx dip = inner_rho(g, st.w, kd);
  const double theta = ip.arg();
  const double dtheta = (dip * ip.conj()).im / ip.abs2();
  const Cplx e = Cplx::polar(1.0, theta);
  const ComplexField a = st.w - k.rotated(theta);
  const ComplexField b = ComplexField::generate(m, [&](std::size_t j) { return e * (kd[j] + Cplx{0.0, dtheta} * k[j]); });
  return -real_inner_H0(g, a, b);
}

/// Bisects the slope on a small bracket around d0. Returns d0 when the slope
/// has no sign change there.
double polish(const SelfSimState& st, double d0, double lo_bound, double hi_bound) {
  const double step = 1e-6;
  double lo = std::max(lo_bound, d0 - step);
  double hi = std::min(hi_bound, d0 + step);
  if (!(reduced_slope(st, lo) < 0.0 && reduced_slope(st, hi) > 0.0)) return d0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = reduced_slope(st, mid);
    if (gm == 0.0) return mid;
    (gm < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool phase_defined(const SelfSimState& st, double d) {
  try {
    fit_theta(st.grid, st.w, d);
    return true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::undefined_phase) throw;
    return false;
  }
}

}  // namespace

ProfileFit fit_profile(const SelfSimState& st, const FitOptions& opt) {
  require_finite(st.w, "fit_profile w");
  require_finite(st.ws, "fit_profile ws");
  if (!(opt.d_lo < opt.d_hi) || opt.d_lo <= -1.0 || opt.d_hi >= 1.0 || opt.prescan < 3) {
    fail(ErrorKind::domain, "fit_profile: bad d bracket or prescan size");
  }

  const std::size_t np = opt.prescan;
  const double span = opt.d_hi - opt.d_lo;
  auto scan_point = [&](std::size_t k) {
    return opt.d_lo + span * static_cast<double>(k) / static_cast<double>(np - 1);
  };
  std::size_t best = 0;
  Trial best_trial = evaluate(st, scan_point(0));
  for (std::size_t k = 1; k < np; ++k) {
    const Trial t = evaluate(st, scan_point(k));
    if (t.value < best_trial.value) {
      best = k;
      best_trial = t;
    }
  }

  double a = scan_point(best == 0 ? 0 : best - 1);
  double b = scan_point(best + 1 >= np ? np - 1 : best + 1);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  Trial fc = evaluate(st, c);
  Trial fd = evaluate(st, d);
  while (b - a > opt.tolerance) {
    if (fc.value <= fd.value) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = evaluate(st, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = evaluate(st, d);
    }
    if (c >= d) break;
  }
  Trial winner = fc.value <= fd.value ? fc : fd;
  if (best_trial.value < winner.value) winner = best_trial;
  if (phase_defined(st, winner.d)) {
    const Trial polished = evaluate(st, polish(st, winner.d, opt.d_lo, opt.d_hi));
    // the root may cost a few ulps of objective value; keep it unless clearly worse
    if (polished.value <= winner.value * (1.0 + 1e-12)) winner = polished;
  }

  ProfileFit fit;
  fit.d = winner.d;
  fit.theta = winner.theta;
  fit.residual = winner.value;
  fit.s = st.s;
  const ComplexField k = kappa_field(st.grid, winner.d, winner.theta);
  fit.residual_h1l2 = norm_H1L2(st.grid, st.w - k, st.ws);
  fit.kappa_norm = norm_H0(st.grid, k);
  fit.converged = fit.residual <= opt.converged_ratio * fit.kappa_norm;
  return fit;
}

RateFit estimate_rate(std::span<const ProfileFit> fits, const RateOptions& opt) {
  std::vector<double> s, logr;
  const double eps = std::numeric_limits<double>::epsilon();
  double min_res = std::numeric_limits<double>::infinity();
  for (const ProfileFit& f : fits) {
    if (f.s >= opt.s_lo && f.s <= opt.s_hi && std::isfinite(f.residual)) min_res = std::min(min_res, f.residual);
  }
  for (const ProfileFit& f : fits) {
    if (f.s < opt.s_lo || f.s > opt.s_hi) continue;
    const double floor = opt.floor >= 0.0 ? opt.floor : std::max(10.0 * eps * f.kappa_norm, 10.0 * min_res);
    if (!(f.residual > floor) || !std::isfinite(f.residual)) continue;
    s.push_back(f.s);
    logr.push_back(std::log(f.residual));
  }
  if (s.size() < opt.min_fits) fail(ErrorKind::rate_undefined, "estimate_rate: too few residuals above the floor");
  const LineFit line = fit_line(s, logr);
  RateFit out;
  out.mu_hat = -line.slope;
  out.c_hat = std::exp(line.intercept);
  out.s_lo = s.front();
  out.s_hi = s.back();
  out.r2 = line.r2;
  out.used = s.size();
  return out;
}

}  // namespace blowup
