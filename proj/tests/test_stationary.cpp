#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blowup/stationary.hpp"

using namespace blowup;

TEST_CASE("kappa0 values") {
  CHECK(kappa0(PowerParam(3.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(kappa0(PowerParam(2.0)) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(kappa0(PowerParam(5.0)) == doctest::Approx(std::pow(0.75, 0.25)).epsilon(1e-15));
  CHECK(kappa0(PowerParam(5.0)) == doctest::Approx(0.9306).epsilon(1e-4));
}

TEST_CASE("kappa values and domain") {
  const PowerParam p(3.0);
  for (double y : {-1.0, -0.3, 0.0, 0.8, 1.0}) CHECK(kappa(0.0, y, p) == doctest::Approx(std::sqrt(2.0)));
  CHECK(kappa(0.5, 0.0, p) == doctest::Approx(std::sqrt(2.0 * 0.75)).epsilon(1e-15));
  CHECK(kappa(0.5, 1.0, p) == doctest::Approx(std::sqrt(2.0 * 0.75) / 1.5).epsilon(1e-15));
  CHECK(kappa(0.5, 0.0, p) == doctest::Approx(1.2247).epsilon(1e-4));
  CHECK(kappa(0.5, 1.0, p) == doctest::Approx(0.8165).epsilon(1e-4));
  CHECK_THROWS_AS(kappa(1.0, 0.0, p), Error);
  CHECK_THROWS_AS(kappa(-1.2, 0.0, p), Error);
}

TEST_CASE("kappa_dd matches a centered difference") {
  const PowerParam p(4.0);
  for (double d : {-0.6, 0.0, 0.3}) {
    for (double y : {-0.9, 0.2, 0.7}) {
      const double h = 1e-6;
      const double fd = (kappa(d + h, y, p) - kappa(d - h, y, p)) / (2.0 * h);
      CHECK(kappa_dd(d, y, p) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("connecting solutions") {
  const PowerParam p(3.0);
  CHECK(connecting_solution(0.0, Branch::plus, 0.0, 0.0, p) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(connecting_solution(0.0, Branch::minus, 0.0, -std::log(2.0), p) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(connecting_solution(0.4, Branch::plus, 0.5, -40.0, p) == doctest::Approx(kappa(0.4, 0.5, p)).epsilon(1e-14));
  CHECK_THROWS_AS(connecting_solution(0.0, Branch::minus, 0.0, 0.0, p), Error);
  CHECK_THROWS_AS(connecting_solution(0.5, Branch::minus, -1.0, -0.2, p), Error);
}

TEST_CASE("connecting solution s-derivatives match finite differences") {
  const PowerParam p(2.5);
  for (Branch b : {Branch::plus, Branch::minus}) {
    const double s = -1.5, y = 0.3, d = 0.2, h = 1e-5;
    const double f0 = connecting_solution(d, b, y, s - h, p);
    const double f1 = connecting_solution(d, b, y, s, p);
    const double f2 = connecting_solution(d, b, y, s + h, p);
    CHECK(connecting_solution_ds(d, b, y, s, p) == doctest::Approx((f2 - f0) / (2.0 * h)).epsilon(1e-8));
    CHECK(connecting_solution_dss(d, b, y, s, p) == doctest::Approx((f2 - 2.0 * f1 + f0) / (h * h)).epsilon(1e-4));
  }
}

TEST_CASE("extended solution closed form") {
  ExtendedSolution u;
  u.T0 = 2.0;
  u.x_star = 0.5;
  CHECK(u.value(0.5, 0.7).re == doctest::Approx(std::sqrt(2.0) / 1.3).epsilon(1e-15));
  CHECK(u.value(0.5, 0.7).im == 0.0);
  ExtendedSolution v = u;
  v.theta0 = std::numbers::pi / 2.0;
  CHECK(std::abs(v.value(0.1, 0.2).re) < 1e-15);
  CHECK(v.value(0.1, 0.2).im == doctest::Approx(u.value(0.1, 0.2).re).epsilon(1e-15));
  CHECK_THROWS_AS(u.value(0.5, 2.0), Error);
  ExtendedSolution w = u;
  w.d0 = 1.0;
  CHECK_THROWS_AS(w.value(0.0, 0.0), Error);

  // derivatives against finite differences
  ExtendedSolution s;
  s.d0 = 0.3;
  s.theta0 = 0.4;
  const double h = 1e-6;
  const Cplx ft = (1.0 / (2.0 * h)) * (s.value(0.2, 0.1 + h) - s.value(0.2, 0.1 - h));
  const Cplx fx = (1.0 / (2.0 * h)) * (s.value(0.2 + h, 0.1) - s.value(0.2 - h, 0.1));
  CHECK(s.dt(0.2, 0.1).re == doctest::Approx(ft.re).epsilon(1e-7));
  CHECK(s.dt(0.2, 0.1).im == doctest::Approx(ft.im).epsilon(1e-7));
  CHECK(s.dx(0.2, 0.1).re == doctest::Approx(fx.re).epsilon(1e-7));
  CHECK(s.blowup_time(1.0) == doctest::Approx(1.3));
}

TEST_CASE("extended solution satisfies the discrete PDE") {
  for (double d0 : {0.0, 0.3}) {
    ExtendedSolution u;
    u.d0 = d0;
    u.T0 = 1.0;
    const Grid1D fine(-1.0, 1.0, 2048);
    CHECK(extended_pde_residual(u, fine, 0.0, 1e-4) <= 1e-5);
    double prev = 0.0;
    for (std::size_t n : {64u, 128u, 256u}) {
      const Grid1D g(-1.0, 1.0, n);
      const double r = extended_pde_residual(u, g, 0.0, 0.5 * g.dx());
      if (prev > 0.0) CHECK(prev / r >= 3.5);
      prev = r;
    }
  }
}

TEST_CASE("stationary residual of the family") {
  const PowerParam p(3.0);
  CHECK(stationary_residual(0.0, 0.0, p, 512) <= 1e-12);
  const double r1 = stationary_residual(0.5, 0.0, p, 512);
  const double r2 = stationary_residual(0.5, 0.0, p, 1024);
  CHECK(r1 / r2 >= 3.5);
  for (double theta : {1.0, std::numbers::pi, -2.0}) {
    CHECK(stationary_residual(0.5, theta, p, 512) == doctest::Approx(r1).epsilon(1e-12));
  }
}

TEST_CASE("connecting solutions satisfy the discrete cylinder equation") {
  const PowerParam p(3.0);
  for (Branch b : {Branch::plus, Branch::minus}) {
    const double s = b == Branch::plus ? 0.5 : -2.0;
    const double r1 = connecting_residual(0.3, b, s, p, 256);
    const double r2 = connecting_residual(0.3, b, s, p, 512);
    CHECK(r2 < 1e-3);
    CHECK(r1 / r2 >= 3.5);
  }
}

TEST_CASE("family norm grows toward the edge") {
  const CylinderGrid g(4096, PowerParam(3.0));
  double prev = 0.0;
  for (double d : {0.0, 0.5, 0.9, 0.99}) {
    const double n = norm_H0(g, kappa_field(g, d));
    CHECK(std::isfinite(n));
    CHECK(n > prev);
    prev = n;
  }
}
