#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "blowup/liouville.hpp"
#include "blowup/stationary.hpp"
#include "fixtures.hpp"

using namespace blowup;

namespace {

const PowerParam P3(3.0);

TrappingOptions serial_options() {
  TrappingOptions o;
  o.policy = ExecPolicy::serial;
  o.record_stride = 128;
  return o;
}

double phase_gap(double a, double b) { return std::remainder(a - b, 2.0 * std::numbers::pi); }

SelfSimState scaled_kappa0(std::size_t m, double c) {
  const CylinderGrid g(m, P3);
  return {0.0, g, kappa_field(g, 0.0).scaled(c), ComplexField(m)};
}

}  // namespace

TEST_CASE("verdict names") {
  CHECK(std::string(to_string(Verdict::decayed_to_family)) == "decayed_to_family");
  CHECK(std::string(to_string(Verdict::escaped)) == "escaped");
}

TEST_CASE("unstable mode grows like e^s under the linearization") {
  const CylinderGrid g(256, P3);
  const SelfSimState mode = unstable_mode(g, 0.3, 0.5);
  const SelfSimState base{0.0, g, kappa_field(g, 0.3, 0.5), ComplexField(256)};
  const double eps = 1e-6;
  const SelfSimState pert{0.0, g, base.w + mode.w.scaled(eps), mode.ws.scaled(eps)};
  const SelfSimRate r0 = rhs(base, ExecPolicy::serial);
  const SelfSimRate r1 = rhs(pert, ExecPolicy::serial);
  // linearized rate of (phi, phi) is (phi, phi) itself
  const ComplexField lin = (r1.dws - r0.dws).scaled(1.0 / eps);
  const double rel = norm_L2rho(g, lin - mode.ws) / norm_L2rho(g, mode.ws);
  CHECK(rel <= 5e-3);
}

TEST_CASE("prepared perturbed kappa(0.3) is trapped by the family") {
  const PreparedData& prep = fixtures::prepared_kappa03();
  CHECK(prep.bracket_width <= 1e-12);
  const TrappingReport rep = trapping_experiment(prep.state, 20.0, serial_options(), "prepared kappa(0.3)");
  CHECK(rep.verdict == Verdict::decayed_to_family);
  CHECK(std::abs(rep.final_fit.d - 0.3) <= 0.05);
  CHECK(rep.final_fit.residual < 1e-3 * rep.final_fit.kappa_norm);
  CHECK_FALSE(rep.am_flag_raised);
  CHECK(rep.series.front().residual > rep.series.back().residual);
}

TEST_CASE("untuned perturbation escapes through the unstable mode") {
  const TrappingReport rep = trapping_experiment(fixtures::perturbed_kappa(256), 20.0, serial_options());
  CHECK(rep.verdict == Verdict::escaped);
  CHECK(rep.am_flag_raised);
  CHECK(rep.final_s < 20.0);
}

TEST_CASE("zero stays zero and small data decays") {
  const TrappingReport z = trapping_experiment(scaled_kappa0(128, 0.0), 4.0, serial_options());
  CHECK(z.verdict == Verdict::decayed_to_zero);
  CHECK(z.final_norm == 0.0);
  const TrappingReport small = trapping_experiment(scaled_kappa0(128, 0.5), 20.0, serial_options());
  CHECK(small.verdict == Verdict::decayed_to_zero);
}

TEST_CASE("5 kappa0 escapes with the energy monitor raised at s = 0") {
  const TrappingReport rep = trapping_experiment(scaled_kappa0(128, 5.0), 20.0, serial_options());
  CHECK(rep.verdict == Verdict::escaped);
  REQUIRE(rep.am_flag_raised);
  CHECK(rep.am_first_s == 0.0);
  CHECK(rep.series.front().energy < 0.0);
}

TEST_CASE("trapping verdict is phase covariant") {
  const PreparedData& prep = fixtures::prepared_kappa03();
  const TrappingOptions o = serial_options();
  const TrappingReport a = trapping_experiment(prep.state, 10.0, o);
  const TrappingReport b = trapping_experiment(prep.state.rotated(1.3), 10.0, o);
  CHECK(a.verdict == b.verdict);
  CHECK(std::abs(a.final_fit.d - b.final_fit.d) <= 1e-9);
  CHECK(std::abs(phase_gap(b.final_fit.theta, a.final_fit.theta + 1.3)) <= 1e-9);
}

TEST_CASE("bounded battery runs end near 0 or near the family") {
  std::vector<SelfSimState> battery;
  battery.push_back(fixtures::prepared_kappa03().state);
  battery.push_back(scaled_kappa0(128, 0.0));
  battery.push_back(scaled_kappa0(128, 0.5));
  {
    // the sampled member is not discretely stationary, so it needs the same tuning
    ShootingOptions so;
    so.policy = ExecPolicy::serial;
    battery.push_back(prepare_trapped(fixtures::perturbed_kappa(128, -0.6, -0.1, 2.0), -0.6, 2.0, so).state);
  }
  for (const SelfSimState& st : battery) {
    const TrappingReport rep = trapping_experiment(st, 12.0, serial_options());
    REQUIRE(rep.verdict != Verdict::escaped);
    const bool near_zero = rep.final_norm <= 0.1 * rep.final_fit.kappa_norm;
    const bool near_family = rep.final_fit.residual <= 0.1 * rep.final_fit.kappa_norm;
    CHECK((near_zero || near_family));
    CHECK(rep.verdict != Verdict::undecided);
  }
}

TEST_CASE("prepare_trapped reports an unbracketable coefficient") {
  ShootingOptions o;
  o.policy = ExecPolicy::serial;
  o.s_max = 1.0;
  CHECK_THROWS_AS(prepare_trapped(scaled_kappa0(64, 0.0), 0.0, 0.0, o), Error);
}

TEST_CASE("vanishing check") {
  const Grid1D g(-20.0, 20.0, 1024);
  EvolveOptions opt;
  opt.policy = ExecPolicy::serial;
  opt.t_end = 8.0;
  opt.snapshot_stride = 20;
  const std::vector<double> times{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};

  SUBCASE("zero data") {
    const EvolveResult run = evolve(constant_data(g, {}, {}), P3, opt);
    const VanishingReport rep = vanishing_check(run, times, P3);
    REQUIRE(rep.applicable);
    REQUIRE(rep.samples.size() == times.size());
    for (const VanishingSample& s : rep.samples) CHECK(s.mass == 0.0);
  }
  SUBCASE("small gaussian") {
    GaussianSpec gs;
    gs.amplitude = 1e-3;
    const EvolveResult run = evolve(gaussian_data(g, gs), P3, opt);
    VanishingOptions vo;
    vo.dispersion_time = 1.0;
    const VanishingReport rep = vanishing_check(run, times, P3, vo);
    REQUIRE(rep.applicable);
    CHECK(rep.non_increasing);
    CHECK(rep.trend < 0.0);
    CHECK(rep.max_mass <= 1e-11);
  }
  SUBCASE("blow-up run is not applicable") {
    const Grid1D small(-1.0, 1.0, 64);
    const EvolveResult run = evolve(constant_data(small, {std::sqrt(2.0), 0.0}, {std::sqrt(2.0), 0.0}), P3, opt);
    const VanishingReport rep = vanishing_check(run, times, P3);
    CHECK_FALSE(rep.applicable);
    CHECK_FALSE(rep.reason.empty());
  }
}
