#include "blowup/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/fit.hpp"
#include "blowup/stationary.hpp"

namespace blowup {

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::decayed_to_family: return "decayed_to_family";
    case Verdict::decayed_to_zero: return "decayed_to_zero";
    case Verdict::escaped: return "escaped";
    case Verdict::undecided: return "undecided";
  }
  return "unknown";
}

namespace {

bool finite_state(const SelfSimState& st) { return st.w.all_finite() && st.ws.all_finite(); }

TrappingSample record(const SelfSimState& st, const FitOptions& fit_opt, ProfileFit& fit) {
  fit = fit_profile(st, fit_opt);
  const double e = energy(st);
  return {st.s, fit.residual, fit.d, fit.theta, norm_H(st.grid, st.w, st.ws), e, e < 0.0};
}

}  // namespace

TrappingReport trapping_experiment(const SelfSimState& initial, double s_end, const TrappingOptions& opt,
                                   std::string description) {
  require_finite(initial.w, "trapping initial w");
  require_finite(initial.ws, "trapping initial ws");
  TrappingReport rep;
  rep.description = std::move(description);
  const double ds = opt.ds > 0.0 ? opt.ds : default_ds(initial.grid);
  const std::size_t stride = std::max<std::size_t>(opt.record_stride, 1);

  SelfSimState st = initial;
  CylinderIntegrator rk(initial.grid, opt.policy);
  auto note = [&](const TrappingSample& smp) {
    rep.series.push_back(smp);
    if (smp.am_flag && !rep.am_flag_raised) {
      rep.am_flag_raised = true;
      rep.am_first_s = smp.s;
    }
  };
  note(record(st, opt.fit, rep.final_fit));

  const auto steps = static_cast<std::size_t>(std::ceil((s_end - initial.s) / ds - 1e-9));
  for (std::size_t k = 1; k <= steps && s_end > initial.s; ++k) {
    const SelfSimState prev = st;
    rk.step(st, k == steps ? s_end - st.s : ds);
    const bool escaped = !finite_state(st) || norm_H(st.grid, st.w, st.ws) > opt.escape_norm;
    if (escaped) {
      const SelfSimState& last = finite_state(st) ? st : prev;
      const double e = energy(last);
      if (e < 0.0 && !rep.am_flag_raised) {
        rep.am_flag_raised = true;
        rep.am_first_s = last.s;
      }
      rep.verdict = Verdict::escaped;
      rep.final_s = last.s;
      rep.final_norm = finite_state(last) ? norm_H(last.grid, last.w, last.ws) : std::numeric_limits<double>::infinity();
      return rep;
    }
    if (k % stride == 0 || k == steps) note(record(st, opt.fit, rep.final_fit));
  }

  rep.final_s = st.s;
  rep.final_norm = norm_H(st.grid, st.w, st.ws);
  if (rep.final_norm < opt.zero_tolerance) {
    rep.verdict = Verdict::decayed_to_zero;
  } else if (rep.final_fit.residual < opt.family_tolerance * rep.final_fit.kappa_norm) {
    rep.verdict = Verdict::decayed_to_family;
  } else {
    rep.verdict = Verdict::undecided;
  }
  return rep;
}

SelfSimState unstable_mode(const CylinderGrid& grid, double d, double theta) {
  const ComplexField k = kappa_field(grid, d, theta);
  const auto y = grid.y();
  const ComplexField phi = ComplexField::generate(grid.m(), [&](std::size_t j) { return (1.0 / (1.0 + d * y[j])) * k[j]; });
  return {0.0, grid, phi, phi};
}

namespace {

enum class Outcome { high, low, undetermined };

Outcome classify_trial(const SelfSimState& start, double kappa_norm, const ShootingOptions& opt) {
  const double ds = opt.ds > 0.0 ? opt.ds : default_ds(start.grid);
  CylinderIntegrator rk(start.grid, opt.policy);
  SelfSimState st = start;
  const std::size_t check = 16;
  for (std::size_t k = 1; st.s < start.s + opt.s_max; ++k) {
    rk.step(st, ds);
    if (!finite_state(st)) return Outcome::high;
    if (k % check != 0) continue;
    const double n = norm_H(st.grid, st.w, st.ws);
    if (n > 3.0 * kappa_norm || energy(st) < 0.0) return Outcome::high;
    if (n < 0.3 * kappa_norm) return Outcome::low;
  }
  return Outcome::undetermined;
}

SelfSimState shifted(const SelfSimState& base, const SelfSimState& mode, double c) {
  return {base.s, base.grid, base.w + mode.w.scaled(c), base.ws + mode.ws.scaled(c)};
}

}  // namespace

PreparedData prepare_trapped(const SelfSimState& base, double d, double theta, const ShootingOptions& opt) {
  require_finite(base.w, "prepare_trapped base w");
  require_finite(base.ws, "prepare_trapped base ws");
  const SelfSimState mode = unstable_mode(base.grid, d, theta);
  const double kn = norm_H0(base.grid, kappa_field(base.grid, d, theta));

  double lo = -opt.bracket, hi = opt.bracket;
  for (int widen = 0;; ++widen) {
    const Outcome a = classify_trial(shifted(base, mode, lo), kn, opt);
    const Outcome b = classify_trial(shifted(base, mode, hi), kn, opt);
    if (a == Outcome::low && b == Outcome::high) break;
    if (widen == 4) {
      fail(ErrorKind::insufficient_data, "prepare_trapped: could not bracket the unstable-mode coefficient");
    }
    lo *= 2.0;
    hi *= 2.0;
  }

  std::size_t it = 0;
  for (; it < opt.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo < opt.width_tolerance) break;
    const Outcome o = classify_trial(shifted(base, mode, mid), kn, opt);
    if (o == Outcome::high) {
      hi = mid;
    } else if (o == Outcome::low) {
      lo = mid;
    } else {
      lo = hi = mid;
      break;
    }
  }
  const double c = 0.5 * (lo + hi);
  return {shifted(base, mode, c), c, hi - lo, it};
}

VanishingReport vanishing_check(const EvolveResult& run, std::span<const double> times, const PowerParam& p,
                                const VanishingOptions& opt) {
  VanishingReport rep;
  if (run.event.blew_up()) {
    rep.applicable = false;
    std::ostringstream os;
    os << "run blew up at t=" << run.event.t_stop << "; the vanishing alternative needs a global solution";
    rep.reason = os.str();
    return rep;
  }
  if (!(opt.horizon > 0.0)) fail(ErrorKind::domain, "vanishing_check: horizon must be positive");
  const double q = 0.5 * (p.p() + 1.0);
  const double scale = std::pow(opt.horizon, 2.0 * (p.p() + 1.0) / (p.p() - 1.0) - 1.0);

  for (double t : times) {
    const WaveState* snap = nullptr;
    for (const WaveState& s : run.snapshots) {
      if (s.t <= t + 1e-12) snap = &s;
    }
    if (run.final_state.t <= t + 1e-12 && (snap == nullptr || snap->t < run.final_state.t)) snap = &run.final_state;
    if (snap == nullptr) {
      std::ostringstream os;
      os << "vanishing_check: no stored state at or before t=" << t;
      fail(ErrorKind::insufficient_data, os.str());
    }
    const Grid1D& g = snap->grid;
    double mass = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
      if (std::abs(g.x(i) - opt.x0) < 0.5 * opt.horizon) mass += std::pow(snap->u[i].abs2(), q);
    }
    mass *= g.dx();
    rep.samples.push_back({snap->t, mass, scale * mass});
    rep.max_mass = std::max(rep.max_mass, mass);
    rep.max_scaled = std::max(rep.max_scaled, scale * mass);
  }

  std::vector<double> ts, ms;
  for (const VanishingSample& s : rep.samples) {
    if (s.t < opt.dispersion_time) continue;
    if (!ms.empty() && s.mass > ms.back() + 1e-6 * rep.max_mass) rep.non_increasing = false;
    ts.push_back(s.t);
    ms.push_back(s.mass);
  }
  if (ts.size() >= 2 && rep.max_mass > 0.0 && ts.front() < ts.back()) {
    rep.trend = fit_line(ts, ms).slope / rep.max_mass;
  }
  return rep;
}

}  // namespace blowup
