#include "blowup/physical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/fit.hpp"

namespace blowup {

const char* to_string(StopCause cause) {
  switch (cause) {
    case StopCause::threshold: return "threshold";
    case StopCause::nan: return "nan";
    case StopCause::max_steps: return "max_steps";
    case StopCause::time_limit: return "time_limit";
  }
  return "unknown";
}

WaveState::WaveState(double t_, Grid1D grid_, ComplexField u_, ComplexField v_)
    : t(t_), grid(grid_), u(std::move(u_)), v(std::move(v_)) {
  require_size(u.size(), grid.n(), "WaveState u");
  require_size(v.size(), grid.n(), "WaveState v");
}

namespace {

void require_step(double dt, const Grid1D& grid) {
  if (!(dt > 0.0) || dt > 0.9 * grid.dx() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "leapfrog step needs 0 < dt <= 0.9 dx, got dt=" << dt << " dx=" << grid.dx();
    fail(ErrorKind::domain, os.str());
  }
}

/// Kick-drift-kick update reusing the acceleration of the current state.
void leapfrog(const Grid1D& grid, const PowerParam& p, ComplexField& u, ComplexField& v, ComplexField& a,
              double dt, kernels::AliveMask alive, ExecPolicy policy) {
  kernels::kick(policy, v, a, 0.5 * dt, alive);
  kernels::drift(policy, u, v, dt, alive);
  kernels::wave_accel(policy, grid, p, u, alive, a);
  kernels::kick(policy, v, a, 0.5 * dt, alive);
}

}  // namespace

WaveState step(const WaveState& state, double dt, const PowerParam& p, ExecPolicy policy) {
  require_step(dt, state.grid);
  WaveState next = state;
  ComplexField a(state.grid.n());
  kernels::wave_accel(policy, state.grid, p, next.u, {}, a);
  leapfrog(state.grid, p, next.u, next.v, a, dt, {}, policy);
  next.t = state.t + dt;
  return next;
}

double adaptive_dt(const WaveState& state, double cfl, double amp_factor, const PowerParam& p,
                   kernels::AliveMask alive) {
  double m = 0.0;
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    if (!alive.empty() && alive[i] == 0) continue;
    m = std::max(m, state.u[i].abs());
  }
  return std::min(cfl * state.grid.dx(), amp_factor * std::pow(1.0 + m, -0.5 * (p.p() - 1.0)));
}

EvolveResult evolve(const WaveState& initial, const PowerParam& p, const EvolveOptions& opt) {
  if (!(opt.cfl > 0.0 && opt.cfl <= 0.9)) fail(ErrorKind::domain, "evolve: cfl must lie in (0, 0.9]");
  if (!(opt.amp_factor > 0.0)) fail(ErrorKind::domain, "evolve: amp_factor must be positive");
  require_finite(initial.u, "evolve initial u");
  require_finite(initial.v, "evolve initial v");
  if (!(opt.threshold > initial.u.max_abs())) {
    fail(ErrorKind::domain, "evolve: threshold must exceed the initial max|u|");
  }

  const Grid1D& grid = initial.grid;
  const std::size_t n = grid.n();
  const bool masked = opt.mode == StopMode::masked;

  EvolveResult out{initial, {}, {}, {}, {}, {}, 0};
  WaveState& state = out.final_state;
  std::vector<std::uint8_t> alive_store(masked ? n : 0, 1);
  const kernels::AliveMask alive(alive_store);
  if (masked) out.freeze_time.assign(n, std::numeric_limits<double>::infinity());

  std::vector<std::size_t> probe_nodes;
  for (double x0 : opt.probes) {
    const std::size_t node = grid.nearest(x0);
    probe_nodes.push_back(node);
    out.traces.push_back({grid.x(node), node, {{state.t, state.u[node].abs()}}});
  }
  out.captures.assign(opt.capture_times.size(), std::nullopt);
  // copy a state only when the next step would pass the capture time
  auto capture_before = [&](double dt) {
    for (std::size_t k = 0; k < opt.capture_times.size(); ++k) {
      if (state.t <= opt.capture_times[k] && state.t + dt > opt.capture_times[k]) out.captures[k] = state;
    }
  };
  auto finish = [&](BlowupEvent event) {
    for (std::size_t k = 0; k < opt.capture_times.size(); ++k) {
      if (state.t <= opt.capture_times[k]) out.captures[k] = state;
    }
    out.event = event;
  };
  if (opt.snapshot_stride > 0) out.snapshots.push_back(state);

  ComplexField a(n);
  kernels::wave_accel(opt.policy, grid, p, state.u, alive, a);
  ComplexField prev_u, prev_v;
  double peak = state.u.max_abs();
  out.event = {state.t, peak, StopCause::max_steps};

  for (; out.steps < opt.max_steps; ++out.steps) {
    if (state.t >= opt.t_end) {
      finish({state.t, peak, StopCause::time_limit});
      return out;
    }
    double dt = adaptive_dt(state, opt.cfl, opt.amp_factor, p, alive);
    if (state.t + dt > opt.t_end) dt = opt.t_end - state.t;
    capture_before(dt);

    prev_u = state.u;
    prev_v = state.v;
    const double prev_t = state.t;
    leapfrog(grid, p, state.u, state.v, a, dt, alive, opt.policy);
    state.t = prev_t + dt;

    if (!state.u.all_finite() || !state.v.all_finite()) {
      state.u = std::move(prev_u);
      state.v = std::move(prev_v);
      state.t = prev_t;
      finish({prev_t, peak, StopCause::nan});
      return out;
    }

    double live_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (masked && alive_store[i] == 0) continue;
      const double mod = state.u[i].abs();
      live_max = std::max(live_max, mod);
      if (masked && mod >= opt.threshold) {
        alive_store[i] = 0;
        out.freeze_time[i] = state.t;
      }
    }
    peak = std::max(peak, live_max);

    for (std::size_t k = 0; k < probe_nodes.size(); ++k) {
      const std::size_t node = probe_nodes[k];
      if (masked && alive_store[node] == 0 && out.freeze_time[node] < state.t) continue;
      out.traces[k].samples.push_back({state.t, state.u[node].abs()});
    }
    if (opt.snapshot_stride > 0 && (out.steps + 1) % opt.snapshot_stride == 0) out.snapshots.push_back(state);

    bool done = false;
    if (!masked) {
      done = live_max >= opt.threshold;
    } else if (!probe_nodes.empty()) {
      done = std::all_of(probe_nodes.begin(), probe_nodes.end(),
                         [&](std::size_t node) { return alive_store[node] == 0; });
    } else {
      done = std::all_of(alive_store.begin(), alive_store.end(), [](std::uint8_t b) { return b == 0; });
    }
    if (done) {
      ++out.steps;
      finish({state.t, peak, StopCause::threshold});
      return out;
    }
  }
  finish({state.t, peak, StopCause::max_steps});
  return out;
}

TimeEstimate estimate_T(const PointTrace& trace, const PowerParam& p, const EstimateOptions& opt) {
  std::vector<double> ts, gs;
  const double e = -0.5 * (p.p() - 1.0);
  for (const TraceSample& s : trace.samples) {
    if (!std::isfinite(s.modulus) || s.modulus < opt.floor || s.modulus > opt.cap) continue;
    ts.push_back(s.t);
    gs.push_back(std::pow(s.modulus, e));
  }
  if (ts.size() < std::max<std::size_t>(opt.min_samples, 2)) {
    std::ostringstream os;
    os << "estimate_T: " << ts.size() << " samples above the floor " << opt.floor << " at x0=" << trace.x0
       << ", need " << opt.min_samples;
    fail(ErrorKind::insufficient_data, os.str());
  }
  const LineFit line = fit_line(ts, gs);
  if (!(line.slope < 0.0)) fail(ErrorKind::insufficient_data, "estimate_T: tail is not growing");
  return {-line.intercept / line.slope, line.r2, ts.size()};
}

WaveState constant_data(const Grid1D& grid, Cplx u0, Cplx u1) {
  const std::size_t n = grid.n();
  return {0.0, grid, ComplexField::generate(n, [&](std::size_t) { return u0; }),
          ComplexField::generate(n, [&](std::size_t) { return u1; })};
}

WaveState gaussian_data(const Grid1D& grid, const GaussianSpec& g) {
  if (!(g.width > 0.0)) fail(ErrorKind::domain, "gaussian data needs width > 0");
  const Cplx e = Cplx::polar(1.0, g.phase);
  auto bump = [&](std::size_t i) {
    const double z = (grid.x(i) - g.center) / g.width;
    return std::exp(-z * z);
  };
  const std::size_t n = grid.n();
  return {0.0, grid, ComplexField::generate(n, [&](std::size_t i) { return g.amplitude * bump(i) * e; }),
          ComplexField::generate(n, [&](std::size_t i) { return g.velocity_amplitude * bump(i) * e; })};
}

double Taper::operator()(double x) const {
  const double dist = x < lo ? lo - x : (x > hi ? x - hi : 0.0);
  if (dist <= 0.0) return 1.0;
  if (dist >= width) return 0.0;
  // smooth step built from f(z) = exp(-1/z)
  auto f = [](double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; };
  const double z = dist / width;
  return f(1.0 - z) / (f(1.0 - z) + f(z));
}

WaveState profile_data(const Grid1D& grid, const ExtendedSolution& solution, const Taper& taper) {
  const std::size_t n = grid.n();
  ComplexField u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double c = taper(x);
    if (c == 0.0) continue;
    u.set(i, c * solution.value(x, 0.0));
    v.set(i, c * solution.dt(x, 0.0));
  }
  return {0.0, grid, std::move(u), std::move(v)};
}

}  // namespace blowup
