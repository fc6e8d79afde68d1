#include "blowup/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "blowup/acceptance.hpp"
#include "blowup/config.hpp"
#include "blowup/curve.hpp"
#include "blowup/io.hpp"
#include "blowup/liouville.hpp"
#include "blowup/physical.hpp"
#include "blowup/profile.hpp"
#include "blowup/selfsim.hpp"
#include "blowup/stationary.hpp"
#include "blowup/svg.hpp"

namespace blowup::cli {

namespace fs = std::filesystem;
using io::CsvWriter;
using io::Json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::divergence: return 4;
    default: return 3;
  }
}

namespace {

/// Everything a command needs besides the parsed config.
struct Run {
  const Invocation& inv;
  const RunConfig& cfg;
  fs::path dir;
  std::string hash;
  std::ostream& out;
  Json results = Json::object();

  fs::path file(const std::string& name) const { return dir / name; }

  void plot(const std::string& name, const svg::Plot& p) const {
    if (!cfg.write_svg) return;
    if (!svg::write_plot(file(name), p, hash)) out << "warning: plot " << name << " was not written\n";
  }
};

Json grid_json(const Grid1D& g) { return {{"xmin", g.xmin()}, {"xmax", g.xmax()}, {"n", g.n()}}; }

Json field_json(const ComplexField& f) {
  return {{"re", std::vector<double>(f.re().begin(), f.re().end())},
          {"im", std::vector<double>(f.im().begin(), f.im().end())}};
}

/// {grid, t, re, im} for u plus {re, im} of u_t under "v".
Json snapshot_json(const WaveState& s) {
  Json j = field_json(s.u);
  j["grid"] = grid_json(s.grid);
  j["t"] = s.t;
  j["v"] = field_json(s.v);
  return j;
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<double> default_probes(const RunConfig& cfg) {
  if (!cfg.evolve.probes.empty()) return cfg.evolve.probes;
  if (!cfg.scan.empty()) return cfg.scan;
  const Grid1D& g = require_grid(cfg);
  return {0.5 * (g.xmin() + g.xmax())};
}

// ---- simulate -------------------------------------------------------------

void simulate(Run& run) {
  const RunConfig& cfg = run.cfg;
  const WaveState init = build_initial(cfg);
  EvolveOptions opt = cfg.evolve;
  opt.probes = default_probes(cfg);
  const EvolveResult res = evolve(init, cfg.p, opt);

  {
    CsvWriter csv(run.file("traces.csv"), run.hash, {"probe", "x", "t", "modulus"});
    for (std::size_t k = 0; k < res.traces.size(); ++k) {
      for (const TraceSample& s : res.traces[k].samples) {
        csv.row({static_cast<long long>(k), res.traces[k].x0, s.t, s.modulus});
      }
    }
  }
  io::ensure_directory(run.file("snapshots"));
  for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(6) << std::setfill('0') << k << ".json";
    io::write_json(run.file("snapshots") / name.str(), snapshot_json(res.snapshots[k]), run.hash);
  }
  io::write_json(run.file("snapshots") / "final.json", snapshot_json(res.final_state), run.hash);
  {
    CsvWriter csv(run.file("snapshots") / "final.csv", run.hash, {"x", "re", "im"});
    for (std::size_t i = 0; i < res.final_state.u.size(); ++i) {
      csv.row({res.final_state.grid.x(i), res.final_state.u[i].re, res.final_state.u[i].im});
    }
  }

  Json estimates = Json::array();
  {
    CsvWriter csv(run.file("estimates.csv"), run.hash, {"x", "T_hat", "r2", "used", "note"});
    for (const PointTrace& tr : res.traces) {
      try {
        const TimeEstimate e = estimate_T(tr, cfg.p, cfg.estimate);
        csv.row({tr.x0, e.T_hat, e.r2, static_cast<long long>(e.used), std::string()});
        estimates.push_back({{"x", tr.x0}, {"T_hat", e.T_hat}, {"r2", e.r2}, {"used", e.used}});
      } catch (const Error& err) {
        csv.row({tr.x0, std::nan(""), std::nan(""), 0LL, std::string(err.what())});
        estimates.push_back({{"x", tr.x0}, {"T_hat", nullptr}, {"note", err.what()}});
      }
    }
  }
  const BlowupEvent& ev = res.event;
  run.results["event"] = ev.blew_up() ? Json{{"t_stop", ev.t_stop}, {"peak_modulus", ev.peak_modulus},
                                              {"cause", to_string(ev.cause)}}
                                      : Json(nullptr);
  run.results["completion"] = {{"cause", to_string(ev.cause)}, {"t", res.final_state.t}, {"steps", res.steps}};
  run.results["estimates"] = estimates;
  run.out << "simulate: " << to_string(ev.cause) << " at t=" << io::format_double(res.final_state.t) << " after "
          << res.steps << " steps\n";
  for (const Json& e : estimates) {
    if (!e["T_hat"].is_null()) run.out << "  T(" << e["x"].get<double>() << ") = " << io::format_double(e["T_hat"].get<double>()) << "\n";
  }

  svg::Plot p{"|u| at the probes", "t", "|u|", false, true, {}};
  for (const PointTrace& tr : res.traces) {
    svg::Series s{"x=" + io::format_double(tr.x0), {}, {}, false};
    for (const TraceSample& smp : tr.samples) {
      if (smp.modulus <= 0.0) continue;
      s.x.push_back(smp.t);
      s.y.push_back(smp.modulus);
    }
    p.series.push_back(std::move(s));
  }
  run.plot("traces.svg", p);
}

// ---- curve ----------------------------------------------------------------

Json holder_json(const HolderEstimate& h, HolderField field) {
  return {{"field", to_string(field)}, {"x0", h.x0},           {"exponent", nullable(h.exponent)},
          {"constant", nullable(h.constant)}, {"r2", h.r2}, {"window", {h.r_lo, h.r_hi}},
          {"used", h.used},           {"flat", h.flat}};
}

void curve(Run& run) {
  const RunConfig& cfg = run.cfg;
  if (cfg.scan.empty()) fail(ErrorKind::config, "config field 'scan': missing required field");
  CurveOptions opt;
  opt.xs = cfg.scan;
  opt.evolve = cfg.evolve;
  opt.estimate = cfg.estimate;
  opt.m = cfg.m;
  opt.fit = cfg.fit;
  opt.capture_cap = cfg.capture_cap;
  opt.min_cone_cells = cfg.min_cone_cells;
  const BlowupCurve c = scan_curve(build_initial(cfg), cfg.p, opt);

  {
    CsvWriter csv(run.file("curve.csv"), run.hash,
                  {"x", "T", "d", "theta_raw", "theta_unwrapped", "residual", "r2_T", "converged", "skip_reason"});
    for (const CurvePoint& pt : c.points) {
      csv.row({pt.x, pt.T, pt.d, pt.theta_raw, pt.theta_unwrapped, pt.residual, pt.r2_T, pt.converged, pt.skip_reason});
    }
  }
  const auto valid = c.valid_points();
  run.results["points"] = c.points.size();
  run.results["valid_points"] = valid.size();
  run.results["phase_ambiguous"] = c.phase_ambiguous;
  if (valid.empty()) {
    std::ostringstream os;
    os << "curve: no valid scan point; the grid [" << c.grid.xmin() << ", " << c.grid.xmax()
       << "] must contain every backward cone";
    for (const CurvePoint& pt : c.points) os << "\n  x=" << pt.x << ": " << pt.skip_reason;
    fail(ErrorKind::out_of_cone, os.str());
  }

  Json checks = Json::object();
  checks["lipschitz_ratio"] = valid.size() >= 2 ? Json(lipschitz_ratio(c)) : Json(nullptr);
  try {
    const DerivativeCheck dc = check_derivative(c);
    checks["max_derivative_gap"] = dc.max_gap;
  } catch (const Error& e) {
    checks["max_derivative_gap"] = nullptr;
    checks["derivative_note"] = e.what();
  }
  run.results["checks"] = checks;

  Json reports = Json::array();
  for (HolderField field : {HolderField::theta, HolderField::slope}) {
    for (const CurvePoint* pt : valid) {
      try {
        reports.push_back(holder_json(curve_holder(c, field, pt->x), field));
      } catch (const Error& e) {
        reports.push_back({{"field", to_string(field)}, {"x0", pt->x}, {"error", e.what()}});
      }
    }
  }
  io::write_json(run.file("holder.json"), {{"reports", reports}}, run.hash);
  run.out << "curve: " << valid.size() << "/" << c.points.size() << " valid points\n";

  svg::Series T{"T", {}, {}, true}, d{"d", {}, {}, true}, th{"theta", {}, {}, true};
  for (const CurvePoint* pt : valid) {
    T.x.push_back(pt->x);
    T.y.push_back(pt->T);
    d.x.push_back(pt->x);
    d.y.push_back(pt->d);
    th.x.push_back(pt->x);
    th.y.push_back(pt->theta_unwrapped);
  }
  run.plot("T.svg", {"blow-up time", "x", "T(x)", false, false, {T}});
  run.plot("d.svg", {"fitted d", "x", "d(x)", false, false, {d}});
  run.plot("theta.svg", {"fitted phase (unwrapped)", "x", "theta(x)", false, false, {th}});
  svg::Plot holder{"Hoelder scatter of theta", "|x-x0|", "|theta(x)-theta(x0)|", true, true, {}};
  if (!valid.empty()) {
    const CurvePoint* mid = valid[valid.size() / 2];
    svg::Series s{"x0=" + io::format_double(mid->x), {}, {}, true};
    for (const CurvePoint* pt : valid) {
      const double r = std::abs(pt->x - mid->x), f = std::abs(pt->theta_unwrapped - mid->theta_unwrapped);
      if (r > 0.0 && f > 0.0) {
        s.x.push_back(r);
        s.y.push_back(f);
      }
    }
    holder.series.push_back(std::move(s));
  }
  run.plot("holder.svg", holder);
}

// ---- selfsim --------------------------------------------------------------

void selfsim(Run& run) {
  const RunConfig& cfg = run.cfg;
  const SelfSimState st = build_cylinder(cfg.cylinder, cfg.m, cfg.p, cfg.policy);
  if (!(cfg.s_end > st.s)) fail(ErrorKind::config, "config field 'selfsim.s_end': must exceed the initial s");
  EvolveWOptions opt;
  opt.ds = cfg.ds;
  opt.stride = cfg.stride;
  opt.policy = cfg.policy;
  const Trajectory traj = evolve_w(st, cfg.s_end, opt);

  const EnergyTrace tr = energy_trace(traj);
  {
    CsvWriter csv(run.file("energy.csv"), run.hash, {"s", "E", "D", "residual"});
    for (const EnergySample& e : tr.samples) csv.row({e.s, e.E, e.D, e.residual});
  }
  std::vector<ProfileFit> fits(traj.size());
  const auto n = static_cast<std::ptrdiff_t>(traj.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    FitOptions fo = cfg.fit;
    fits[static_cast<std::size_t>(k)] = fit_profile(traj[static_cast<std::size_t>(k)], fo);
  }
  {
    CsvWriter csv(run.file("fits.csv"), run.hash, {"s", "d", "theta", "residual", "converged"});
    for (const ProfileFit& f : fits) csv.row({f.s, f.d, f.theta, f.residual, f.converged});
  }
  run.results["initial"] = describe(cfg.cylinder);
  run.results["s_end"] = traj.back().s;
  run.results["energy_start"] = tr.samples.front().E;
  run.results["energy_end"] = tr.samples.back().E;
  run.results["dissipation_residual"] = traj.size() >= 2 ? Json(dissipation_residual(traj)) : Json(nullptr);
  run.results["resolution_warning"] = tr.resolution_warning;
  run.results["am_monitor_end"] = am_monitor(traj.back());
  try {
    const RateFit r = estimate_rate(fits);
    run.results["rate"] = {{"mu_hat", r.mu_hat}, {"c_hat", r.c_hat}, {"s_lo", r.s_lo},
                           {"s_hi", r.s_hi},     {"r2", r.r2},       {"used", r.used}};
  } catch (const Error& e) {
    run.results["rate"] = {{"error", e.what()}};
  }
  run.out << "selfsim: s=" << io::format_double(traj.back().s) << " E=" << io::format_double(tr.samples.back().E)
          << " residual=" << io::format_double(fits.back().residual) << "\n";

  svg::Series E{"E", {}, {}, false}, R{"residual", {}, {}, false};
  for (const EnergySample& e : tr.samples) {
    E.x.push_back(e.s);
    E.y.push_back(e.E);
  }
  for (const ProfileFit& f : fits) {
    if (!(f.residual > 0.0)) continue;
    R.x.push_back(f.s);
    R.y.push_back(f.residual);
  }
  run.plot("energy.svg", {"Lyapunov functional", "s", "E(s)", false, false, {E}});
  run.plot("residual.svg", {"distance to the family", "s", "residual", false, true, {R}});
}

// ---- liouville ------------------------------------------------------------

Json report_json(const TrappingReport& r) {
  Json series = Json::array();
  for (const TrappingSample& s : r.series) {
    series.push_back({{"s", s.s}, {"residual", s.residual}, {"d", s.d}, {"theta", s.theta},
                      {"norm", s.norm}, {"energy", s.energy}, {"am_flag", s.am_flag}});
  }
  return {{"description", r.description},
          {"verdict", to_string(r.verdict)},
          {"final_s", r.final_s},
          {"final_fit",
           {{"d", r.final_fit.d}, {"theta", r.final_fit.theta}, {"residual", r.final_fit.residual},
            {"kappa_norm", r.final_fit.kappa_norm}, {"converged", r.final_fit.converged}}},
          {"final_norm", r.final_norm},
          {"am_flag_raised", r.am_flag_raised},
          {"am_first_s", nullable(r.am_first_s)},
          {"series", series}};
}

void liouville(Run& run) {
  const RunConfig& cfg = run.cfg;
  const std::vector<CylinderSpec> specs = cfg.battery.empty() ? default_battery() : cfg.battery;
  std::vector<TrappingReport> reports(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  const auto n = static_cast<std::ptrdiff_t>(specs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      const SelfSimState st = build_cylinder(specs[i], cfg.m, cfg.p, ExecPolicy::serial);
      TrappingOptions opt;
      opt.ds = cfg.ds;
      opt.fit = cfg.fit;
      opt.policy = ExecPolicy::serial;
      reports[i] = trapping_experiment(st, st.s + cfg.liouville_s_end, opt, describe(specs[i]));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Json all = Json::array();
  {
    CsvWriter csv(run.file("verdicts.csv"), run.hash,
                  {"initial", "verdict", "final_s", "d", "theta", "residual", "kappa_norm", "final_norm", "am_flag",
                   "am_first_s"});
    for (const TrappingReport& r : reports) {
      csv.row({r.description, std::string(to_string(r.verdict)), r.final_s, r.final_fit.d, r.final_fit.theta,
               r.final_fit.residual, r.final_fit.kappa_norm, r.final_norm, r.am_flag_raised, r.am_first_s});
      all.push_back(report_json(r));
      run.out << "  " << std::left << std::setw(48) << r.description << " " << to_string(r.verdict) << "\n";
    }
  }
  io::write_json(run.file("reports.json"), {{"reports", all}}, run.hash);
  Json counts = Json::object();
  for (const TrappingReport& r : reports) counts[to_string(r.verdict)] = counts.value(to_string(r.verdict), 0) + 1;
  run.results["verdicts"] = counts;

  if (!cfg.vanishing_times.empty()) {
    EvolveOptions opt = cfg.evolve;
    if (opt.snapshot_stride == 0) opt.snapshot_stride = 1;
    opt.t_end = std::min(opt.t_end, *std::max_element(cfg.vanishing_times.begin(), cfg.vanishing_times.end()));
    const EvolveResult res = evolve(build_initial(cfg), cfg.p, opt);
    const VanishingReport v = vanishing_check(res, cfg.vanishing_times, cfg.p, cfg.vanishing);
    CsvWriter csv(run.file("vanishing.csv"), run.hash, {"t", "mass", "scaled"});
    for (const VanishingSample& s : v.samples) csv.row({s.t, s.mass, s.scaled});
    run.results["vanishing"] = {{"applicable", v.applicable}, {"reason", v.reason},     {"max_mass", v.max_mass},
                                {"max_scaled", v.max_scaled}, {"trend", v.trend}, {"non_increasing", v.non_increasing}};
  }

  svg::Plot p{"distance to the family", "s", "residual", false, true, {}};
  for (const TrappingReport& r : reports) {
    svg::Series s{r.description, {}, {}, false};
    for (const TrappingSample& smp : r.series) {
      if (!(smp.residual > 0.0)) continue;
      s.x.push_back(smp.s);
      s.y.push_back(smp.residual);
    }
    p.series.push_back(std::move(s));
  }
  run.plot("trapping.svg", p);
}

// ---- profile-eval ---------------------------------------------------------

void profile_eval(Run& run) {
  const RunConfig& cfg = run.cfg;
  const double d = cfg.cylinder.d, theta = cfg.cylinder.theta;
  const CylinderGrid g(cfg.m, cfg.p);
  const ComplexField k = kappa_field(g, d, theta);
  const auto y = g.y();
  {
    CsvWriter csv(run.file("profile.csv"), run.hash, {"y", "re", "im", "abs", "kappa_dd"});
    for (std::size_t j = 0; j < g.m(); ++j) csv.row({y[j], k[j].re, k[j].im, k[j].abs(), kappa_dd(d, y[j], cfg.p)});
  }
  const SelfSimState st(0.0, g, k, ComplexField(g.m()));
  run.results["d"] = d;
  run.results["theta"] = theta;
  run.results["m"] = cfg.m;
  run.results["kappa0"] = kappa0(cfg.p);
  run.results["energy"] = energy(st);
  run.results["norm_H0"] = norm_H0(g, k);
  run.results["stationary_residual"] = norm_L2rho(g, steady_residual(g, k));
  run.out << "profile-eval: d=" << d << " theta=" << theta << " E=" << io::format_double(energy(st)) << "\n";

  svg::Series s{"|kappa|", {}, {}, false};
  for (std::size_t j = 0; j < g.m(); ++j) {
    s.x.push_back(y[j]);
    s.y.push_back(k[j].abs());
  }
  run.plot("profile.svg", {"stationary profile", "y", "|kappa(d, y)|", false, false, {s}});
}

fs::path output_directory(const RunConfig& cfg) {
  if (const char* env = std::getenv("BLOWUP_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return cfg.output_directory;
}

}  // namespace

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  using Fn = void (*)(Run&);
  Fn fn = nullptr;
  if (inv.command == "simulate") fn = simulate;
  if (inv.command == "curve") fn = curve;
  if (inv.command == "selfsim") fn = selfsim;
  if (inv.command == "liouville") fn = liouville;
  if (inv.command == "profile-eval") fn = profile_eval;
  if (fn == nullptr) {
    err << "error [config]: unknown command '" << inv.command << "'\n";
    return 2;
  }
  try {
    Json doc = load_json_file(inv.config_path);
    for (const std::string& o : inv.overrides) apply_override(doc, o);
    const RunConfig cfg = parse_config(doc);
    // where results land does not change them
    Json hashed = cfg.document;
    hashed.erase("output");
    Run r{inv, cfg, output_directory(cfg), io::config_hash(hashed), out};
    io::ensure_directory(r.dir);
    fn(r);

    Json meta;
    meta["command"] = inv.command;
    meta["config_path"] = inv.config_path;
    meta["overrides"] = inv.overrides;
    meta["config"] = cfg.document;
    meta["p"] = cfg.p.p();
    meta["grid"] = cfg.grid ? grid_json(*cfg.grid) : Json(nullptr);
    meta["cfl"] = cfg.evolve.cfl;
    meta["threshold"] = cfg.evolve.threshold;
    // every solver path is deterministic
    meta["seed"] = nullptr;
    meta["results"] = r.results;
    io::write_json(r.file("meta.json"), meta, r.hash);
    out << "wrote " << r.dir.string() << " (config_hash " << r.hash << ")\n";
    return 0;
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int verify(bool quick, const std::vector<int>& only, std::ostream& out) {
  AcceptanceOptions opt;
  opt.quick = quick;
  opt.only = only;
  out << "acceptance battery (" << (quick ? "quick" : "full") << " mode)\n";
  if (quick) {
    out << "quick-mode resolutions and tolerances (full / quick):\n";
    for (const ToleranceRow& row : tolerance_table()) {
      if (row.full == row.quick) continue;
      out << "  criterion " << std::setw(2) << row.id << "  " << std::left << std::setw(36) << row.quantity
          << std::right << " " << row.full << " / " << row.quick << "\n";
    }
  }
  std::size_t failed = 0;
  run_acceptance(opt, [&](const CriterionResult& r) {
    out << format_result(r) << "\n" << std::flush;
    if (!r.pass) ++failed;
  });
  out << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace blowup::cli
