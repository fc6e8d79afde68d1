#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "blowup/curve.hpp"
#include "blowup/fit.hpp"
#include "blowup/stationary.hpp"

using namespace blowup;

namespace {

const PowerParam P3(3.0);

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

BlowupCurve synthetic_curve(const std::vector<double>& x, double (*T)(double), double d) {
  std::vector<double> ts, ds;
  for (double v : x) {
    ts.push_back(T(v));
    ds.push_back(d);
  }
  return make_curve(x, ts, ds);
}

CurveOptions scan_points(std::vector<double> xs) {
  CurveOptions o;
  o.xs = std::move(xs);
  o.evolve.policy = ExecPolicy::serial;
  return o;
}

}  // namespace

TEST_CASE("phase_unwrap examples") {
  const std::vector<double> a{3.1, -3.1};
  const Unwrapped ua = phase_unwrap(a);
  CHECK(ua.values[0] == 3.1);
  CHECK(ua.values[1] == doctest::Approx(2.0 * std::numbers::pi - 3.1));
  const std::vector<double> flat{0.4, 0.4, 0.4};
  CHECK(phase_unwrap(flat).values == flat);
  const std::vector<double> ramp{0.0, 2.0, 4.0, 6.0};
  const Unwrapped ur = phase_unwrap(ramp);
  for (std::size_t i = 0; i < ramp.size(); ++i) CHECK(ur.values[i] == doctest::Approx(ramp[i]));
  const std::vector<double> half{0.0, std::numbers::pi};
  const Unwrapped uh = phase_unwrap(half);
  CHECK(uh.ambiguous[1]);
  CHECK_FALSE(uh.ambiguous[0]);
}

TEST_CASE("check_derivative on synthetic curves") {
  const auto x = linspace(-1.0, 1.0, 21);
  const DerivativeCheck dc = check_derivative(synthetic_curve(x, [](double v) { return 1.0 + 0.1 * v; }, 0.1));
  CHECK(dc.max_gap <= 1e-14);
  CHECK(std::isnan(dc.gap.front()));
  CHECK(std::isnan(dc.gap.back()));
  const std::vector<double> two{0.0, 1.0};
  const std::vector<double> tt{1.0, 1.0};
  CHECK_THROWS_AS(check_derivative(make_curve(two, tt, tt)), Error);
  const std::vector<double> bad{0.0, 0.0};
  CHECK_THROWS_AS(make_curve(bad, tt), Error);
}

TEST_CASE("noncharacteristic cone test") {
  const auto x = linspace(-1.0, 1.0, 41);
  CHECK(noncharacteristic_test(synthetic_curve(x, [](double) { return 1.0; }, 0.0), 0.0, 0.5));
  const BlowupCurve straight = synthetic_curve(x, [](double v) { return 1.0 + 0.3 * v; }, 0.3);
  for (double x0 : x) CHECK(noncharacteristic_test(straight, x0, 0.5));
  const BlowupCurve corner = synthetic_curve(x, [](double v) { return 1.0 - std::abs(v); }, 0.0);
  CHECK_FALSE(noncharacteristic_test(corner, 0.0, 0.9));
  CHECK_THROWS_AS(noncharacteristic_test(corner, 0.0, 1.0), Error);
}

TEST_CASE("slope bound around a point") {
  const auto x = linspace(-1.0, 1.0, 41);
  const SlopeBound flat = slope_bound_check(synthetic_curve(x, [](double) { return 1.0; }, 0.0), 0.0, 0.5);
  CHECK(flat.ok);
  CHECK(flat.worst_slope == 0.0);
  CHECK(flat.bound == 0.5);
  const SlopeBound straight = slope_bound_check(synthetic_curve(x, [](double v) { return 1.0 + 0.3 * v; }, 0.3), 0.0, 0.5);
  CHECK(straight.ok);
  CHECK(straight.worst_slope == doctest::Approx(0.3));
  CHECK(straight.bound == doctest::Approx(0.65));
  const SlopeBound steep = slope_bound_check(synthetic_curve(x, [](double v) { return 1.0 + 0.9 * v; }, 0.3), 0.0, 0.5);
  CHECK_FALSE(steep.ok);
  CHECK(steep.ratio == doctest::Approx(0.9 / 0.65));
  CHECK(steep.ok_loose);
  CHECK(steep.ratio_loose == doctest::Approx(0.9 / 1.3));
}

TEST_CASE("lipschitz ratio") {
  const auto x = linspace(-1.0, 1.0, 11);
  CHECK(lipschitz_ratio(synthetic_curve(x, [](double v) { return 1.0 - std::abs(v); }, 0.0)) == doctest::Approx(1.0));
}

TEST_CASE("holder exponent of power laws") {
  std::vector<double> x, f, g, c;
  for (int k = -20; k <= 20; ++k) {
    const double v = k == 0 ? 0.0 : std::copysign(std::pow(2.0, -std::abs(k) / 2.0), static_cast<double>(k));
    x.push_back(v);
  }
  std::sort(x.begin(), x.end());
  for (double v : x) {
    f.push_back(std::pow(std::abs(v), 0.5));
    const double osc = v == 0.0 ? 0.0 : 0.05 * std::sin(1.0 / v) * std::exp(-std::abs(v));
    g.push_back(std::pow(std::abs(v), 0.7) * (1.0 + osc));
    c.push_back(2.0);
  }
  const HolderEstimate a = holder_exponent(x, f, 0.0);
  CHECK(std::abs(a.exponent - 0.5) <= 1e-6);
  CHECK(a.constant == doctest::Approx(1.0));
  CHECK(a.used == 40);
  const HolderEstimate b = holder_exponent(x, g, 0.0);
  CHECK(std::abs(b.exponent - 0.7) <= 0.05);
  const HolderEstimate flat = holder_exponent(x, c, 0.0);
  CHECK(flat.flat);
  CHECK(std::isnan(flat.exponent));

  HolderOptions few;
  few.r_min = 0.4;
  CHECK_THROWS_AS(holder_exponent(x, f, 0.0, few), Error);
  CHECK_THROWS_AS(holder_exponent(x, f, 0.123), Error);
  std::vector<double> rev(x.rbegin(), x.rend());
  CHECK_THROWS_AS(holder_exponent(rev, f, 0.0), Error);
}

TEST_CASE("scan of constant data is flat") {
  const Grid1D g(-2.0, 2.0, 256);
  const WaveState init = constant_data(g, {std::sqrt(2.0), 0.0}, {std::sqrt(2.0), 0.0});
  const BlowupCurve c = scan_curve(init, P3, scan_points(linspace(-0.5, 0.5, 9)));
  REQUIRE(c.valid_points().size() == 9);
  for (const CurvePoint& pt : c.points) {
    CHECK(std::abs(pt.T - 1.0) <= 1e-3);
    CHECK(std::abs(pt.d) <= 1e-2);
    CHECK(std::abs(pt.theta_raw) <= 1e-2);
    CHECK(pt.converged);
  }
  CHECK(check_derivative(c).max_gap <= 1e-2);
  CHECK(lipschitz_ratio(c) <= 1.05);
  CHECK(noncharacteristic_test(c, 0.0, 0.5));
  CHECK(curve_holder(c, HolderField::theta, 0.0).flat);
}

TEST_CASE("cone-invalid points carry a skip reason") {
  const Grid1D g(-1.2, 1.2, 128);
  const WaveState init = constant_data(g, {std::sqrt(2.0), 0.0}, {std::sqrt(2.0), 0.0});
  const BlowupCurve c = scan_curve(init, P3, scan_points({-0.5, 0.0, 0.5}));
  REQUIRE(c.points.size() == 3);
  CHECK_FALSE(c.points[0].valid());
  CHECK(c.points[1].valid());
  CHECK_FALSE(c.points[2].valid());
  CHECK(c.points[0].skip_reason.find("cone") != std::string::npos);
}

TEST_CASE("scan of the tilted explicit solution") {
  ExtendedSolution sol;
  sol.d0 = 0.3;
  sol.T0 = 1.0;
  sol.theta0 = 0.8;
  const Grid1D g(-4.0, 4.0, 1024);
  const WaveState init = profile_data(g, sol, Taper{-2.0, 2.0, 1.0});
  const BlowupCurve c = scan_curve(init, P3, scan_points(linspace(-0.6, 0.6, 7)));
  const auto pts = c.valid_points();
  REQUIRE(pts.size() == 7);
  std::vector<double> xs, ts;
  for (const CurvePoint* pt : pts) {
    CHECK(std::abs(pt->T - sol.blowup_time(pt->x)) <= 5e-3);
    CHECK(std::abs(pt->d - 0.3) <= 2e-2);
    CHECK(std::abs(pt->theta_raw - 0.8) <= 2e-2);
    xs.push_back(pt->x);
    ts.push_back(pt->T);
  }
  const LineFit line = fit_line(xs, ts);
  CHECK(std::abs(line.slope - 0.3) <= 2e-2);
  CHECK(check_derivative(c).max_gap <= 2e-2);
  CHECK(lipschitz_ratio(c) <= 1.05);
  for (double x0 : xs) CHECK(noncharacteristic_test(c, x0, 0.5));
  const SlopeBound sb = slope_bound_check(c, 0.0, 0.6);
  CHECK(sb.ok);
}

TEST_CASE("scan covariance under rotation and reflection") {
  const Grid1D g(-6.0, 6.0, 768);
  GaussianSpec gs;
  gs.amplitude = 3.0;
  gs.center = 0.2;
  const WaveState init = gaussian_data(g, gs);
  gs.center = -0.2;
  const WaveState mirror = gaussian_data(g, gs);
  const CurveOptions opt = scan_points(linspace(-0.1875, 0.5625, 5));
  const BlowupCurve base = scan_curve(init, P3, opt);
  const BlowupCurve turned = scan_curve(init.times_i(), P3, opt);
  REQUIRE(base.valid_points().size() == 5);
  for (std::size_t i = 0; i < base.points.size(); ++i) {
    const CurvePoint& a = base.points[i];
    const CurvePoint& b = turned.points[i];
    CHECK(std::abs(a.T - b.T) <= 1e-10);
    CHECK(std::abs(a.d - b.d) <= 1e-10);
    CHECK(std::abs(std::remainder(b.theta_raw - a.theta_raw - 0.5 * std::numbers::pi, 2.0 * std::numbers::pi)) <= 1e-10);
  }

  CurveOptions mopt = opt;
  mopt.xs.clear();
  for (auto it = opt.xs.rbegin(); it != opt.xs.rend(); ++it) mopt.xs.push_back(-*it);
  const BlowupCurve flipped = scan_curve(mirror, P3, mopt);
  const std::size_t n = base.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const CurvePoint& a = base.points[i];
    const CurvePoint& b = flipped.points[n - 1 - i];
    CHECK(b.x == doctest::Approx(-a.x));
    CHECK(std::abs(a.T - b.T) <= 1e-6);
    CHECK(std::abs(a.d + b.d) <= 1e-3);
    CHECK(std::abs(std::remainder(a.theta_raw - b.theta_raw, 2.0 * std::numbers::pi)) <= 1e-3);
  }
}
