#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "blowup/physical.hpp"

using namespace blowup;

namespace {

const PowerParam P3(3.0);

// Exact ODE solution for constant data (sqrt 2, sqrt 2) at p = 3.
double ode_exact(double t) { return std::sqrt(2.0) / (1.0 - t); }

WaveState ode_data(const Grid1D& g, double alpha = 0.0) {
  const Cplx c = Cplx::polar(std::sqrt(2.0), alpha);
  return constant_data(g, c, c);
}

double max_ode_error(double dt, double t_end) {
  const Grid1D g(0.0, 8.0, 8);
  WaveState s = ode_data(g);
  double worst = 0.0;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t k = 0; k < steps; ++k) {
    s = step(s, dt, P3, ExecPolicy::serial);
    worst = std::max(worst, std::abs(s.u[0].re - ode_exact(s.t)));
  }
  return worst;
}

// C-infinity bump supported in |x| < 1.
double bump(double x) { return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0; }

}  // namespace

TEST_CASE("zero data stays zero") {
  const Grid1D g(-1.0, 1.0, 64);
  WaveState s = constant_data(g, {}, {});
  for (int k = 0; k < 100; ++k) s = step(s, 0.5 * g.dx(), P3);
  CHECK(s.u.max_abs() == 0.0);
  CHECK(s.v.max_abs() == 0.0);
}

TEST_CASE("step validates dt") {
  const Grid1D g(-1.0, 1.0, 64);
  const WaveState s = constant_data(g, {}, {});
  CHECK_THROWS_AS(step(s, g.dx(), P3), Error);
  CHECK_THROWS_AS(step(s, 0.0, P3), Error);
}

TEST_CASE("constant data follows the ODE solution") {
  const Grid1D g(0.0, 8.0, 8);
  WaveState s = ode_data(g);
  for (int k = 0; k < 5000; ++k) s = step(s, 1e-4, P3, ExecPolicy::serial);
  CHECK(s.t == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::abs(s.u[i].re - ode_exact(0.5)) <= 1e-4);
    CHECK(s.u[i].im == 0.0);
  }
}

TEST_CASE("leapfrog is second order on the ODE solution") {
  const double e1 = max_ode_error(2e-3, 0.9);
  const double e2 = max_ode_error(1e-3, 0.9);
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("phase equivariance of the solver") {
  const Grid1D g(-6.0, 6.0, 512);
  const WaveState base = gaussian_data(g, {1.5, 0.3, 1.0, 0.5, 0.0});
  for (double alpha : {0.7, 2.0, -1.1}) {
    WaveState a = base, b = base.rotated(alpha);
    for (int k = 0; k < 400; ++k) {
      a = step(a, 0.5 * g.dx(), P3);
      b = step(b, 0.5 * g.dx(), P3);
    }
    const double scale = a.u.max_abs();
    CHECK((a.rotated(alpha).u - b.u).max_abs() <= 1e-12 * scale);
    CHECK((a.rotated(alpha).v - b.v).max_abs() <= 1e-12 * std::max(1.0, a.v.max_abs()));
  }
}

TEST_CASE("translation equivariance is exact on the periodic grid") {
  const Grid1D g(-4.0, 4.0, 256);
  const WaveState base = gaussian_data(g, {1.2, -0.5, 0.7, 0.0, 0.3});
  const std::size_t k = 37;
  auto shift = [&](const ComplexField& f) {
    return ComplexField::generate(256, [&](std::size_t i) { return f[(i + 256 - k) % 256]; });
  };
  WaveState a = base;
  WaveState b{0.0, g, shift(base.u), shift(base.v)};
  for (int n = 0; n < 300; ++n) {
    a = step(a, 0.4 * g.dx(), P3);
    b = step(b, 0.4 * g.dx(), P3);
  }
  CHECK(shift(a.u) == b.u);
  CHECK(shift(a.v) == b.v);
}

TEST_CASE("real data stays real") {
  const Grid1D g(-4.0, 4.0, 256);
  WaveState s = gaussian_data(g, {1.8, 0.0, 1.0, 0.2, 0.0});
  for (int n = 0; n < 500; ++n) s = step(s, 0.5 * g.dx(), P3);
  double im = 0.0;
  for (std::size_t i = 0; i < 256; ++i) im = std::max(im, std::abs(s.u[i].im));
  CHECK(im <= 1e-13 * s.u.max_abs());
}

namespace {

// Largest |u| beyond the light cone |x| > 1 + t, relative to the peak.
double cone_leak(std::size_t n, double cfl) {
  const Grid1D g(-8.0, 8.0, n);
  const ComplexField u0 = ComplexField::generate(n, [&](std::size_t i) { return Cplx{0.8 * bump(g.x(i)), 0.0}; });
  EvolveOptions opt;
  opt.t_end = 2.0;
  opt.cfl = cfl;
  const EvolveResult r = evolve(WaveState{0.0, g, u0, ComplexField(n)}, P3, opt);
  double peak = 0.0, leak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max(peak, r.final_state.u[i].abs());
    if (std::abs(g.x(i)) > 1.0 + r.final_state.t) leak = std::max(leak, r.final_state.u[i].abs());
  }
  return leak / peak;
}

}  // namespace

TEST_CASE("finite speed of propagation") {
  CHECK(cone_leak(4096, 0.9) <= 1e-8);
  // the leak is numerical dispersion and shrinks under refinement
  CHECK(cone_leak(2048, 0.5) / cone_leak(4096, 0.5) >= 8.0);

  const Grid1D g(-8.0, 8.0, 2048);
  const ComplexField u0 = ComplexField::generate(2048, [&](std::size_t i) { return Cplx{0.8 * bump(g.x(i)), 0.0}; });
  EvolveOptions opt;
  opt.t_end = 2.0;
  opt.probes = {3.5, -3.5};
  const EvolveResult r = evolve(WaveState{0.0, g, u0, ComplexField(2048)}, P3, opt);
  CHECK(r.event.cause == StopCause::time_limit);
  // the perturbation-free run is identically zero, so the trace itself is the leak
  for (const PointTrace& tr : r.traces) {
    for (const TraceSample& s : tr.samples) {
      if (std::abs(tr.x0) > 1.0 + s.t) CHECK(s.modulus <= 1e-10);
    }
  }
}

TEST_CASE("adaptive_dt formula") {
  const Grid1D g(0.0, 1.28, 128);  // dx = 1e-2
  const WaveState zero = constant_data(g, {}, {});
  CHECK(adaptive_dt(zero, 0.5, 0.02, P3) == doctest::Approx(std::min(0.5e-2, 0.02)));
  CHECK(adaptive_dt(zero, 0.5, 1e-3, P3) == doctest::Approx(1e-3));
  const WaveState big = constant_data(g, {1000.0, 0.0}, {});
  CHECK(adaptive_dt(big, 1.0, 0.5, P3) == doctest::Approx(0.5 / 1001.0).epsilon(1e-14));
  CHECK(adaptive_dt(big, 1.0, 0.5, P3) == doctest::Approx(4.995e-4).epsilon(1e-3));
  const WaveState bigger = constant_data(g, {2000.0, 0.0}, {});
  const double ratio = adaptive_dt(bigger, 1.0, 0.5, P3) / adaptive_dt(big, 1.0, 0.5, P3);
  CHECK(ratio == doctest::Approx(0.5).epsilon(1e-3));
  // masked nodes do not shrink the step
  std::vector<std::uint8_t> alive(128, 0);
  CHECK(adaptive_dt(big, 1.0, 0.5, P3, alive) == doctest::Approx(0.01));
}

TEST_CASE("evolve stops at the threshold crossing") {
  const Grid1D g(-1.0, 1.0, 64);
  EvolveOptions opt;
  opt.threshold = 1e3;
  const EvolveResult r = evolve(ode_data(g), P3, opt);
  CHECK(r.event.cause == StopCause::threshold);
  CHECK(r.event.blew_up());
  CHECK(r.event.peak_modulus >= 1e3);
  CHECK(r.event.t_stop == doctest::Approx(1.0 - std::sqrt(2.0) / 1e3).epsilon(1e-4));
}

TEST_CASE("evolve on zero data exhausts max_steps") {
  const Grid1D g(-1.0, 1.0, 64);
  EvolveOptions opt;
  opt.max_steps = 200;
  const EvolveResult r = evolve(constant_data(g, {}, {}), P3, opt);
  CHECK(r.event.cause == StopCause::max_steps);
  CHECK_FALSE(r.event.blew_up());
  CHECK(r.steps == 200);
  opt.threshold = 0.0;
  CHECK_THROWS_AS(evolve(constant_data(g, {}, {}), P3, opt), Error);
}

TEST_CASE("capture times keep the last state before each time") {
  const Grid1D g(-1.0, 1.0, 64);
  EvolveOptions opt;
  opt.threshold = 1e3;
  opt.capture_times = {0.5, 0.9, 2.0};
  const EvolveResult r = evolve(ode_data(g), P3, opt);
  REQUIRE(r.captures.size() == 3);
  REQUIRE(r.captures[0].has_value());
  CHECK(r.captures[0]->t <= 0.5);
  CHECK(r.captures[0]->t > 0.49);
  CHECK(r.captures[1]->t <= 0.9);
  CHECK(r.captures[2]->t == r.final_state.t);
}

TEST_CASE("estimate_T on the exact ODE trace") {
  PointTrace tr;
  for (int k = 0; k <= 120; ++k) {
    const double t = 1.0 - std::pow(10.0, -k / 20.0);
    tr.samples.push_back({t, ode_exact(t)});
  }
  const TimeEstimate e = estimate_T(tr, P3);
  CHECK(e.T_hat == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimate_T on the solver trace") {
  const Grid1D g(-1.0, 1.0, 256);
  EvolveOptions opt;
  opt.probes = {0.0};
  const EvolveResult r = evolve(ode_data(g), P3, opt);
  const TimeEstimate e = estimate_T(r.traces[0], P3);
  CHECK(std::abs(e.T_hat - 1.0) <= 1e-3);
}

TEST_CASE("estimate_T rejects a flat trace") {
  PointTrace tr;
  for (int k = 0; k < 50; ++k) tr.samples.push_back({0.01 * k, 1.0});
  try {
    estimate_T(tr, P3);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
}

TEST_CASE("masked evolution follows a tilted blow-up curve") {
  ExtendedSolution sol;
  sol.d0 = 0.3;
  sol.T0 = 1.0;
  const Grid1D g(-4.0, 4.0, 1024);
  const WaveState init = profile_data(g, sol, Taper{-2.0, 2.0, 1.0});
  EvolveOptions opt;
  opt.mode = StopMode::masked;
  opt.probes = {-0.5, 0.0, 0.5};
  const EvolveResult r = evolve(init, P3, opt);
  CHECK(r.event.cause == StopCause::threshold);
  for (const PointTrace& tr : r.traces) {
    CHECK(tr.samples.back().modulus >= opt.threshold);
    const TimeEstimate e = estimate_T(tr, P3);
    CHECK(e.T_hat == doctest::Approx(sol.blowup_time(tr.x0)).epsilon(2e-3));
    CHECK(r.freeze_time[tr.node] <= sol.blowup_time(tr.x0));
  }
}

TEST_CASE("taper is a smooth cutoff") {
  const Taper t{-1.0, 1.0, 0.5};
  CHECK(t(0.0) == 1.0);
  CHECK(t(-1.0) == 1.0);
  CHECK(t(1.5) == 0.0);
  CHECK(t(-2.0) == 0.0);
  CHECK(t(1.25) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double x = 1.0; x <= 1.5; x += 0.01) {
    CHECK(t(x) <= prev);
    prev = t(x);
  }
}
