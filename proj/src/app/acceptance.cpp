#include "blowup/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "blowup/config.hpp"
#include "blowup/curve.hpp"
#include "blowup/fit.hpp"
#include "blowup/liouville.hpp"
#include "blowup/physical.hpp"
#include "blowup/profile.hpp"
#include "blowup/selfsim.hpp"
#include "blowup/stationary.hpp"

namespace blowup {

namespace {

const PowerParam P3(3.0);

/// A tolerance or resolution in full and quick mode.
template <class T>
struct Pinned {
  T full;
  T quick;
  T operator()(bool q) const { return q ? quick : full; }
};

// ---- pinned resolutions and tolerances ----------------------------------
constexpr std::size_t kOdeNodes = 256;
constexpr double kOdeTol = 1e-3;
constexpr double kOdeSeconds = 60.0;

constexpr Pinned<std::size_t> kStatM{1024, 512};
constexpr Pinned<double> kStatRatio{3.5, 3.3};
constexpr double kStatZeroTol = 1e-12;

constexpr Pinned<std::size_t> kEnergyM{1024, 512};
constexpr Pinned<double> kEnergyRel{5e-3, 5e-3};
constexpr Pinned<double> kEnergyAbs{2e-3, 4e-3};

constexpr Pinned<std::size_t> kDissM{512, 256};
constexpr Pinned<double> kDissTol{1e-2, 2e-2};
constexpr double kDissRatio = 2.0;
constexpr double kDissSpan = 2.0;

constexpr double kExtTol = 1e-5;
constexpr double kOrderRatio = 3.5;
constexpr double kTransformTol = 1e-6;
constexpr double kConnectingTol = 1e-3;

constexpr Pinned<std::size_t> kFitM{512, 256};
constexpr double kFitTol = 1e-6;
constexpr double kEquivTol = 1e-10;

constexpr Pinned<std::size_t> kRateM{256, 128};
constexpr double kRateSEnd = 10.0;
constexpr double kRateSlo = 1.0;
constexpr double kRateR2 = 0.9;
/// Allowed relative rise between consecutive residuals inside the rate window.
constexpr double kMonotoneSlack = 1e-2;

constexpr Pinned<std::size_t> kCurveN{1024, 512};
constexpr Pinned<double> kCurveSlopeTol{2e-2, 3e-2};
constexpr Pinned<double> kCurveGapTol{2e-2, 3e-2};
constexpr double kCurveThetaTol = 2e-2;
constexpr double kCurveRotTol = 1e-10;

constexpr double kLipschitz = 1.05;
constexpr double kSolverPhaseTol = 1e-12;
constexpr double kLeakTol = 1e-8;
constexpr std::size_t kLeakNodes = 4096;
constexpr double kEnergySlack = 1e-6;

constexpr Pinned<std::size_t> kBatteryM{256, 128};
constexpr Pinned<double> kBatterySEnd{20.0, 12.0};
constexpr double kNearFraction = 0.1;

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string fix(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

double phase_gap(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi)); }

SelfSimState perturbed_kappa(std::size_t m, double d, double eps, double theta) {
  CylinderSpec spec;
  spec.type = "perturbed_kappa";
  spec.d = d;
  spec.eps = eps;
  spec.theta = theta;
  return build_cylinder(spec, m, P3, ExecPolicy::parallel);
}

SelfSimState prepared(std::size_t m, double d, double eps, double theta) {
  ShootingOptions opt;
  return prepare_trapped(perturbed_kappa(m, d, eps, theta), d, theta, opt).state;
}

/// Runs shared between criteria, computed on first use.
class Context {
 public:
  explicit Context(bool quick) : quick_(quick) {}

  const SelfSimState& prepared03() {
    if (!prep03_) prep03_ = prepared(kRateM(quick_), 0.3, 0.05, 0.0);
    return *prep03_;
  }

  const Trajectory& dissipation_run(std::size_t m) {
    auto& slot = m == kDissM(quick_) ? diss_coarse_ : diss_fine_;
    if (!slot) {
      const CylinderGrid g(m, P3);
      const auto y = g.y();
      const double k0 = kappa0(P3);
      const SelfSimState s0(0.0, g, ComplexField::generate(m, [&](std::size_t j) {
                              return Cplx{k0 * (1.0 + 0.1 * (1.0 - y[j] * y[j])), 0.0};
                            }),
                            ComplexField(m));
      slot = evolve_w(s0, kDissSpan);
    }
    return *slot;
  }

  const Trajectory& rate_run() {
    if (!rate_) {
      EvolveWOptions opt;
      opt.stride = 16;
      rate_ = evolve_w(prepared03(), kRateSEnd, opt);
    }
    return *rate_;
  }

  const std::vector<TrappingReport>& battery() {
    if (battery_) return *battery_;
    const std::vector<CylinderSpec> specs = default_battery();
    std::vector<TrappingReport> reports(specs.size());
    const std::size_t m = kBatteryM(quick_);
    const double s_end = kBatterySEnd(quick_);
    const auto n = static_cast<std::ptrdiff_t>(specs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const CylinderSpec& spec = specs[static_cast<std::size_t>(k)];
      TrappingOptions opt;
      opt.policy = ExecPolicy::serial;
      const SelfSimState st = build_cylinder(spec, m, P3, ExecPolicy::serial);
      reports[static_cast<std::size_t>(k)] = trapping_experiment(st, st.s + s_end, opt, describe(spec));
    }
    battery_ = std::move(reports);
    return *battery_;
  }

  const BlowupCurve& tilted(bool turned) {
    auto& slot = turned ? tilted_turned_ : tilted_;
    if (!slot) {
      const WaveState init = tilted_data();
      slot = scan_curve(turned ? init.times_i() : init, P3, tilted_options());
    }
    return *slot;
  }

  WaveState tilted_data() const {
    const Grid1D g(-4.0, 4.0, kCurveN(quick_));
    return profile_data(g, tilted_solution(), Taper{-2.0, 2.0, 1.0});
  }

  static ExtendedSolution tilted_solution() {
    ExtendedSolution sol;
    sol.d0 = 0.3;
    sol.theta0 = 0.8;
    sol.T0 = 1.0;
    return sol;
  }

  static CurveOptions tilted_options() {
    CurveOptions o;
    o.xs = linspace(-0.6, 0.6, 7);
    return o;
  }

  bool quick() const { return quick_; }

 private:
  bool quick_;
  std::optional<SelfSimState> prep03_;
  std::optional<Trajectory> diss_coarse_, diss_fine_, rate_;
  std::optional<std::vector<TrappingReport>> battery_;
  std::optional<BlowupCurve> tilted_, tilted_turned_;
};

// ---- criteria -----------------------------------------------------------

CriterionResult ode_oracle(Context&) {
  CriterionResult r{1, "ODE blow-up oracle", false, {}, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const Grid1D g(-1.0, 1.0, kOdeNodes);
  const Cplx c{std::sqrt(2.0), 0.0};
  auto run = [&](double threshold) {
    EvolveOptions opt;
    opt.probes = {0.0};
    opt.threshold = threshold;
    const EvolveResult res = evolve(constant_data(g, c, c), P3, opt);
    return estimate_T(res.traces[0], P3).T_hat;
  };
  const double T = run(1e6);
  const double T_low = run(1e5);
  const double seconds = since(t0);
  r.pass = std::abs(T - 1.0) <= kOdeTol && std::abs(T_low - 1.0) <= kOdeTol && seconds < kOdeSeconds;
  r.detail = "T(0)=" + fix(T, 7) + " (threshold 1e5: " + fix(T_low, 7) + "), n=" + std::to_string(kOdeNodes) +
             ", |T-1|<=" + sci(kOdeTol);
  return r;
}

CriterionResult stationary(const FamilyFn& family, bool quick) {
  CriterionResult r{2, "stationary family residual", false, {}, 0.0};
  const std::size_t m1 = kStatM(quick), m2 = 2 * m1;
  const CylinderGrid g1(m1, P3), g2(m2, P3);
  auto residual = [&](const CylinderGrid& g, double d, double theta) {
    return norm_L2rho(g, steady_residual(g, family(g, d, theta)));
  };
  double worst_zero = 0.0, min_ratio = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (double d : {0.0, 0.5, -0.5, 0.9}) {
    for (double theta : {0.0, 1.0, std::numbers::pi}) {
      const double r1 = residual(g1, d, theta);
      if (d == 0.0) {
        worst_zero = std::max(worst_zero, r1);
        ok = ok && r1 <= kStatZeroTol;
        continue;
      }
      const double ratio = r1 / residual(g2, d, theta);
      min_ratio = std::min(min_ratio, ratio);
      ok = ok && ratio >= kStatRatio(quick);
    }
  }
  r.pass = ok;
  r.detail = "m " + std::to_string(m1) + "->" + std::to_string(m2) + ": min ratio " + fix(min_ratio, 3) +
             " (>=" + fix(kStatRatio(quick), 1) + "), d=0 residual " + sci(worst_zero) + " (<=" + sci(kStatZeroTol) + ")";
  return r;
}

CriterionResult family_energy(Context& ctx) {
  CriterionResult r{3, "energy of the family", false, {}, 0.0};
  const std::size_t m = kEnergyM(ctx.quick());
  const CylinderGrid g(m, P3);
  auto E = [&](double d, double theta) { return energy(SelfSimState(0.0, g, kappa_field(g, d, theta), ComplexField(m))); };
  const double e0 = E(0.0, 0.0);
  double worst = 0.0;
  for (double d : {0.0, 0.5, -0.5, 0.9}) {
    for (double theta : {0.0, 1.0, std::numbers::pi}) worst = std::max(worst, std::abs(E(d, theta) - e0) / e0);
  }
  const double abs_err = std::abs(e0 - 4.0 / 3.0);
  r.pass = worst <= kEnergyRel(ctx.quick()) && abs_err <= kEnergyAbs(ctx.quick());
  r.detail = "m=" + std::to_string(m) + ": E(kappa0)=" + fix(e0, 6) + " |E-4/3|=" + sci(abs_err) + " (<=" +
             sci(kEnergyAbs(ctx.quick())) + "), battery spread " + sci(worst) + " (<=" + sci(kEnergyRel(ctx.quick())) + ")";
  return r;
}

CriterionResult dissipation(Context& ctx) {
  CriterionResult r{4, "dissipation identity", false, {}, 0.0};
  const std::size_t m = kDissM(ctx.quick());
  const double r1 = dissipation_residual(ctx.dissipation_run(m));
  const double r2 = dissipation_residual(ctx.dissipation_run(2 * m));
  r.pass = r1 <= kDissTol(ctx.quick()) && r1 / r2 >= kDissRatio;
  r.detail = "m=" + std::to_string(m) + ": " + sci(r1) + " (<=" + sci(kDissTol(ctx.quick())) + "), m=" +
             std::to_string(2 * m) + ": " + sci(r2) + ", ratio " + fix(r1 / r2, 2) + " (>=2)";
  return r;
}

CriterionResult closed_forms(Context&) {
  CriterionResult r{5, "closed-form solutions", false, {}, 0.0};
  bool ok = true;
  double worst_fine = 0.0, min_order = std::numeric_limits<double>::infinity(), worst_transform = 0.0;
  for (double d0 : {0.0, 0.3}) {
    ExtendedSolution u;
    u.d0 = d0;
    u.T0 = 1.0;
    const double fine = extended_pde_residual(u, Grid1D(-1.0, 1.0, 2048), 0.0, 1e-4);
    worst_fine = std::max(worst_fine, fine);
    ok = ok && fine <= kExtTol;
    double prev = 0.0;
    for (std::size_t n : {64u, 128u, 256u}) {
      const Grid1D g(-1.0, 1.0, n);
      const double res = extended_pde_residual(u, g, 0.0, 0.5 * g.dx());
      if (prev > 0.0) {
        min_order = std::min(min_order, prev / res);
        ok = ok && prev / res >= kOrderRatio;
      }
      prev = res;
    }
    // transform at the vertex (x*, T0) from t = 0.5
    const Grid1D g(-1.0, 1.0, 4096);
    const CylinderGrid cg(512, P3);
    for (double theta0 : {0.0, 1.2}) {
      u.theta0 = theta0;
      const double t = 0.5;
      const WaveState sample{t, g, ComplexField::generate(g.n(), [&](std::size_t i) { return u.value(g.x(i), t); }),
                             ComplexField::generate(g.n(), [&](std::size_t i) { return u.dt(g.x(i), t); })};
      const SelfSimState st = to_selfsimilar(sample, 0.0, 1.0, cg);
      const double dist = norm_H(cg, st.w - kappa_field(cg, d0, theta0), st.ws);
      worst_transform = std::max(worst_transform, dist);
      ok = ok && dist <= kTransformTol;
    }
  }
  double worst_conn = 0.0, min_conn_order = std::numeric_limits<double>::infinity();
  for (Branch b : {Branch::plus, Branch::minus}) {
    const double s = b == Branch::plus ? 0.5 : -2.0;
    const double r1 = connecting_residual(0.3, b, s, P3, 256);
    const double r2 = connecting_residual(0.3, b, s, P3, 512);
    worst_conn = std::max(worst_conn, r2);
    min_conn_order = std::min(min_conn_order, r1 / r2);
    ok = ok && r2 < kConnectingTol && r1 / r2 >= kOrderRatio;
  }
  r.pass = ok;
  r.detail = "PDE residual " + sci(worst_fine) + " (<=" + sci(kExtTol) + "), order " + fix(min_order, 2) +
             "; transform H-distance " + sci(worst_transform) + " (<=" + sci(kTransformTol) + "); w+- residual " +
             sci(worst_conn) + ", order " + fix(min_conn_order, 2);
  return r;
}

CriterionResult fit_exactness(Context& ctx) {
  CriterionResult r{6, "profile fit exactness", false, {}, 0.0};
  const std::size_t m = kFitM(ctx.quick());
  const CylinderGrid g(m, P3);
  const ProfileFit f = fit_profile(SelfSimState(0.0, g, kappa_field(g, 0.3, 1.0), ComplexField(m)));
  const double fit_err = std::max(std::abs(f.d - 0.3), phase_gap(f.theta, 1.0));

  const SelfSimState base = perturbed_kappa(256, 0.3, 0.05, 0.4);
  const ProfileFit b = fit_profile(base);
  double equiv = 0.0;
  for (double alpha : {0.9, -2.5}) {
    const ProfileFit a = fit_profile(base.rotated(alpha));
    equiv = std::max({equiv, std::abs(a.d - b.d), phase_gap(a.theta, b.theta + alpha)});
  }
  const ProfileFit refl = fit_profile(base.reflected());
  equiv = std::max({equiv, std::abs(refl.d + b.d), phase_gap(refl.theta, b.theta)});
  r.pass = fit_err <= kFitTol && equiv <= kEquivTol;
  r.detail = "m=" + std::to_string(m) + ": (0.3, 1.0) error " + sci(fit_err) + " (<=" + sci(kFitTol) +
             "), rotation/reflection " + sci(equiv) + " (<=" + sci(kEquivTol) + ")";
  return r;
}

CriterionResult convergence(Context& ctx) {
  CriterionResult r{7, "convergence to the profile", false, {}, 0.0};
  std::vector<ProfileFit> fits;
  for (const SelfSimState& st : ctx.rate_run()) fits.push_back(fit_profile(st));
  RateOptions ro;
  ro.s_lo = kRateSlo;
  const RateFit rate = estimate_rate(fits, ro);
  double worst_rise = 0.0;
  for (std::size_t k = 1; k < fits.size(); ++k) {
    if (fits[k - 1].s < rate.s_lo || fits[k].s > rate.s_hi) continue;
    worst_rise = std::max(worst_rise, fits[k].residual / fits[k - 1].residual - 1.0);
  }
  r.pass = rate.mu_hat > 0.0 && rate.r2 >= kRateR2 && worst_rise <= kMonotoneSlack;
  r.detail = "prepared perturbed kappa(0.3), m=" + std::to_string(kRateM(ctx.quick())) + ": mu_hat=" +
             fix(rate.mu_hat) + " r2=" + fix(rate.r2, 5) + " on s in [" + fix(rate.s_lo, 2) + ", " + fix(rate.s_hi, 2) +
             "], worst residual rise " + sci(worst_rise) + " (<=" + sci(kMonotoneSlack) + ")";
  return r;
}

CriterionResult curve_pipeline(Context& ctx) {
  CriterionResult r{8, "blow-up curve pipeline", false, {}, 0.0};
  const BlowupCurve& c = ctx.tilted(false);
  const auto pts = c.valid_points();
  std::vector<double> xs, ts;
  double theta_lo = std::numeric_limits<double>::infinity(), theta_hi = -theta_lo;
  for (const CurvePoint* pt : pts) {
    xs.push_back(pt->x);
    ts.push_back(pt->T);
    theta_lo = std::min(theta_lo, pt->theta_unwrapped);
    theta_hi = std::max(theta_hi, pt->theta_unwrapped);
  }
  if (pts.size() < c.points.size()) {
    r.detail = std::to_string(c.points.size() - pts.size()) + " scan points skipped";
    return r;
  }
  const double slope = fit_line(xs, ts).slope;
  const double gap = check_derivative(c).max_gap;
  const double spread = theta_hi - theta_lo;

  const BlowupCurve& turned = ctx.tilted(true);
  double rot = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const CurvePoint& a = c.points[i];
    const CurvePoint& b = turned.points[i];
    if (!b.valid()) {
      rot = std::numeric_limits<double>::infinity();
      break;
    }
    rot = std::max({rot, std::abs(a.T - b.T), std::abs(a.d - b.d),
                    phase_gap(b.theta_raw, a.theta_raw + 0.5 * std::numbers::pi)});
  }
  const bool q = ctx.quick();
  r.pass = std::abs(slope - 0.3) <= kCurveSlopeTol(q) && gap <= kCurveGapTol(q) && spread <= kCurveThetaTol &&
           rot <= kCurveRotTol;
  r.detail = "n=" + std::to_string(kCurveN(q)) + ": slope " + fix(slope, 5) + " (0.3+-" + sci(kCurveSlopeTol(q)) +
             "), max|T'-d| " + sci(gap) + ", theta spread " + sci(spread) + ", quarter-turn rerun " + sci(rot) +
             " (<=" + sci(kCurveRotTol) + ")";
  if (!q) {
    // ungraded: generic angles are not bitwise equivariant through the masked fronts
    const WaveState init = ctx.tilted_data().rotated(1.0);
    const BlowupCurve gen = scan_curve(init, P3, Context::tilted_options());
    double dT = 0.0, dd = 0.0, dth = 0.0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      if (!gen.points[i].valid()) continue;
      dT = std::max(dT, std::abs(gen.points[i].T - c.points[i].T));
      dd = std::max(dd, std::abs(gen.points[i].d - c.points[i].d));
      dth = std::max(dth, phase_gap(gen.points[i].theta_raw, c.points[i].theta_raw + 1.0));
    }
    r.detail += "; diagnostic alpha=1: max|dT| " + sci(dT) + " max|dd| " + sci(dd) + " max|dtheta-1| " + sci(dth);
  }
  return r;
}

double cone_leak() {
  const Grid1D g(-8.0, 8.0, kLeakNodes);
  auto bump = [](double x) { return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0; };
  const ComplexField u0 = ComplexField::generate(g.n(), [&](std::size_t i) { return Cplx{0.8 * bump(g.x(i)), 0.0}; });
  EvolveOptions opt;
  opt.t_end = 2.0;
  opt.cfl = 0.9;
  const EvolveResult res = evolve(WaveState{0.0, g, u0, ComplexField(g.n())}, P3, opt);
  double peak = 0.0, leak = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    peak = std::max(peak, res.final_state.u[i].abs());
    if (std::abs(g.x(i)) > 1.0 + res.final_state.t) leak = std::max(leak, res.final_state.u[i].abs());
  }
  return leak / peak;
}

double solver_phase_defect() {
  const Grid1D g(-6.0, 6.0, 512);
  const WaveState base = gaussian_data(g, {1.5, 0.3, 1.0, 0.5, 0.0});
  double worst = 0.0;
  for (double alpha : {0.7, 2.0, -1.1}) {
    WaveState a = base, b = base.rotated(alpha);
    for (int k = 0; k < 400; ++k) {
      a = step(a, 0.5 * g.dx(), P3);
      b = step(b, 0.5 * g.dx(), P3);
    }
    worst = std::max(worst, (a.rotated(alpha).u - b.u).max_abs() / a.u.max_abs());
    worst = std::max(worst, (a.rotated(alpha).v - b.v).max_abs() / std::max(1.0, a.v.max_abs()));
  }
  return worst;
}

/// Largest rise of E between consecutive samples, relative to 1 + |E|.
double energy_rise(const std::vector<double>& E) {
  double worst = 0.0;
  for (std::size_t k = 1; k < E.size(); ++k) worst = std::max(worst, (E[k] - E[k - 1]) / (1.0 + std::abs(E[k - 1])));
  return worst;
}

std::vector<double> energies(const Trajectory& traj) {
  std::vector<double> out;
  for (const EnergySample& s : energy_trace(traj).samples) out.push_back(s.E);
  return out;
}

CriterionResult invariants(Context& ctx) {
  CriterionResult r{9, "structural invariants", false, {}, 0.0};
  const double lip = lipschitz_ratio(ctx.tilted(false));
  const double phase = solver_phase_defect();
  const double leak = cone_leak();

  std::vector<std::vector<double>> runs;
  runs.push_back(energies(ctx.dissipation_run(kDissM(ctx.quick()))));
  runs.push_back(energies(ctx.rate_run()));
  for (const TrappingReport& rep : ctx.battery()) {
    std::vector<double> E;
    for (const TrappingSample& s : rep.series) E.push_back(s.energy);
    runs.push_back(std::move(E));
  }
  double rise = 0.0;
  for (const auto& E : runs) rise = std::max(rise, energy_rise(E));

  r.pass = lip <= kLipschitz && phase <= kSolverPhaseTol && leak <= kLeakTol && rise <= kEnergySlack;
  r.detail = "Lipschitz ratio " + fix(lip, 4) + " (<=" + fix(kLipschitz, 2) + "), solver phase " + sci(phase) + " (<=" +
             sci(kSolverPhaseTol) + "), cone leak n=" + std::to_string(kLeakNodes) + " " + sci(leak) + " (<=" +
             sci(kLeakTol) + "), max energy rise over " + std::to_string(runs.size()) + " trajectories " + sci(rise) +
             " (<=" + sci(kEnergySlack) + ")";
  return r;
}

/// Default battery members expected to escape: w- blows up at finite s, 5 kappa0
/// has E < 0, the untuned perturbation leaves along the unstable mode.
const std::vector<bool> kExpectEscape{false, false, false, false, false, false, true, true, true};
constexpr std::size_t kFiveKappa0 = 7;

CriterionResult trapping(Context& ctx) {
  CriterionResult r{10, "trapping battery", false, {}, 0.0};
  const std::vector<TrappingReport>& reps = ctx.battery();
  bool ok = reps.size() == kExpectEscape.size();
  std::size_t bounded = 0, classified = 0;
  std::string misses;
  for (std::size_t k = 0; k < reps.size() && ok; ++k) {
    const TrappingReport& rep = reps[k];
    const bool escaped = rep.verdict == Verdict::escaped;
    if (escaped != kExpectEscape[k]) {
      ok = false;
      misses += " [" + rep.description + ": " + to_string(rep.verdict) + "]";
      continue;
    }
    if (escaped) continue;
    ++bounded;
    const bool near_zero = rep.final_norm <= kNearFraction * rep.final_fit.kappa_norm;
    const bool near_family = rep.final_fit.residual <= kNearFraction * rep.final_fit.kappa_norm;
    const bool decided = rep.verdict == Verdict::decayed_to_family || rep.verdict == Verdict::decayed_to_zero;
    if (decided && (near_zero || near_family)) {
      ++classified;
    } else {
      ok = false;
      misses += " [" + rep.description + ": " + to_string(rep.verdict) + "]";
    }
  }
  const bool am = ok && reps[kFiveKappa0].am_flag_raised && reps[kFiveKappa0].am_first_s == reps[kFiveKappa0].series.front().s;
  r.pass = ok && am;
  r.detail = "m=" + std::to_string(kBatteryM(ctx.quick())) + ", s-span " + fix(kBatterySEnd(ctx.quick()), 0) + ": " +
             std::to_string(classified) + "/" + std::to_string(bounded) + " bounded runs at 0 or the family, E<0 monitor on 5 kappa0 " +
             (am ? "fired at start" : "did not fire at start") + misses;
  return r;
}

ComplexField default_family(const CylinderGrid& g, double d, double theta) { return kappa_field(g, d, theta); }

}  // namespace

CriterionResult criterion_stationary(const FamilyFn& family, bool quick) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = stationary(family, quick);
  } catch (const std::exception& e) {
    r = {2, "stationary family residual", false, std::string("error: ") + e.what(), 0.0};
  }
  r.seconds = since(t0);
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  Context ctx(options.quick);
  using Fn = CriterionResult (*)(Context&);
  struct Entry {
    int id;
    const char* title;
    Fn fn;
  };
  static const Entry entries[] = {
      {1, "ODE blow-up oracle", ode_oracle},
      {2, "stationary family residual", nullptr},
      {3, "energy of the family", family_energy},
      {4, "dissipation identity", dissipation},
      {5, "closed-form solutions", closed_forms},
      {6, "profile fit exactness", fit_exactness},
      {7, "convergence to the profile", convergence},
      {8, "blow-up curve pipeline", curve_pipeline},
      {9, "structural invariants", invariants},
      {10, "trapping battery", trapping},
  };
  std::vector<CriterionResult> out;
  for (const Entry& e : entries) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), e.id) == options.only.end()) continue;
    CriterionResult r;
    if (e.fn == nullptr) {
      r = criterion_stationary(default_family, options.quick);
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        r = e.fn(ctx);
      } catch (const std::exception& ex) {
        r = {e.id, e.title, false, std::string("error: ") + ex.what(), 0.0};
      }
      r.seconds = since(t0);
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << (r.id < 10 ? " " : "") << r.id << "  " << (r.pass ? "PASS" : "FAIL") << "  " << r.title << "  ("
     << r.detail << ")  [" << fix(r.seconds, 1) << " s]";
  return os.str();
}

std::vector<ToleranceRow> tolerance_table() {
  auto n = [](std::size_t v) { return std::to_string(v); };
  auto pair = [](auto p, auto f) { return std::pair<std::string, std::string>{f(p.full), f(p.quick)}; };
  auto s = [](double v) { return sci(v); };
  auto f1 = [](double v) { return fix(v, 1); };
  std::vector<ToleranceRow> rows;
  auto add = [&](int id, std::string what, std::pair<std::string, std::string> v) {
    rows.push_back({id, std::move(what), v.first, v.second});
  };
  add(1, "|T(0)-1|, n=" + n(kOdeNodes), {s(kOdeTol), s(kOdeTol)});
  add(2, "m (coarse)", pair(kStatM, n));
  add(2, "residual ratio on doubling", pair(kStatRatio, f1));
  add(2, "d=0 residual", {s(kStatZeroTol), s(kStatZeroTol)});
  add(3, "m", pair(kEnergyM, n));
  add(3, "|E(kappa0)-4/3|", pair(kEnergyAbs, s));
  add(3, "relative spread over (d, theta)", pair(kEnergyRel, s));
  add(4, "m (coarse)", pair(kDissM, n));
  add(4, "dissipation residual", pair(kDissTol, s));
  add(5, "PDE residual / transform / w+- residual", {s(kExtTol) + " / " + s(kTransformTol) + " / " + s(kConnectingTol),
                                                      s(kExtTol) + " / " + s(kTransformTol) + " / " + s(kConnectingTol)});
  add(6, "m", pair(kFitM, n));
  add(6, "parameter error / equivariance", {s(kFitTol) + " / " + s(kEquivTol), s(kFitTol) + " / " + s(kEquivTol)});
  add(7, "m", pair(kRateM, n));
  add(7, "r2 / residual rise", {fix(kRateR2, 2) + " / " + s(kMonotoneSlack), fix(kRateR2, 2) + " / " + s(kMonotoneSlack)});
  add(8, "n", pair(kCurveN, n));
  add(8, "slope - 0.3", pair(kCurveSlopeTol, s));
  add(8, "|T'-d|", pair(kCurveGapTol, s));
  add(8, "theta spread / quarter turn", {s(kCurveThetaTol) + " / " + s(kCurveRotTol), s(kCurveThetaTol) + " / " + s(kCurveRotTol)});
  add(9, "Lipschitz / phase / leak / energy rise",
      {fix(kLipschitz, 2) + " / " + s(kSolverPhaseTol) + " / " + s(kLeakTol) + " / " + s(kEnergySlack),
       fix(kLipschitz, 2) + " / " + s(kSolverPhaseTol) + " / " + s(kLeakTol) + " / " + s(kEnergySlack)});
  add(10, "m", pair(kBatteryM, n));
  add(10, "s-span", pair(kBatterySEnd, f1));
  return rows;
}

}  // namespace blowup
