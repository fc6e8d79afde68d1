#include "blowup/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/kernels.hpp"

namespace blowup {

double kappa0(const PowerParam& p) {
  return std::pow(p.mass(), 1.0 / (p.p() - 1.0));
}

namespace {

void require_slope(double d) {
  if (!(std::abs(d) < 1.0)) {
    std::ostringstream os;
    os << "profile parameter |d| must be < 1, got " << d;
    fail(ErrorKind::domain, os.str());
  }
}

double amplitude(double d, const PowerParam& p) {
  return kappa0(p) * std::pow((1.0 - d) * (1.0 + d), 1.0 / (p.p() - 1.0));
}

double connecting_denominator(double d, Branch sign, double y, double s) {
  const double e = std::exp(s);
  const double den = 1.0 + (sign == Branch::plus ? e : -e) + d * y;
  if (!(den > 0.0)) fail(ErrorKind::domain, "connecting solution: denominator 1 +- e^s + d y must be positive");
  return den;
}

}  // namespace

double kappa(double d, double y, const PowerParam& p) {
  require_slope(d);
  return amplitude(d, p) / std::pow(1.0 + d * y, p.alpha());
}

double kappa_dd(double d, double y, const PowerParam& p) {
  require_slope(d);
  const double a = p.alpha();
  // log kappa = const + log(1-d^2)/(p-1) - a log(1+dy)
  const double dlog = -2.0 * d / ((p.p() - 1.0) * (1.0 - d * d)) - a * y / (1.0 + d * y);
  return kappa(d, y, p) * dlog;
}

ComplexField kappa_field(const CylinderGrid& grid, double d, double theta) {
  require_slope(d);
  const auto y = grid.y();
  const Cplx e = Cplx::polar(1.0, theta);
  return ComplexField::generate(grid.m(), [&](std::size_t j) { return kappa(d, y[j], grid.power()) * e; });
}

double connecting_solution(double d, Branch sign, double y, double s, const PowerParam& p) {
  require_slope(d);
  return amplitude(d, p) / std::pow(connecting_denominator(d, sign, y, s), p.alpha());
}

double connecting_solution_ds(double d, Branch sign, double y, double s, const PowerParam& p) {
  const double den = connecting_denominator(d, sign, y, s);
  const double e = sign == Branch::plus ? std::exp(s) : -std::exp(s);
  const double a = p.alpha();
  return -a * amplitude(d, p) * e / std::pow(den, a + 1.0);
}

double connecting_solution_dss(double d, Branch sign, double y, double s, const PowerParam& p) {
  const double den = connecting_denominator(d, sign, y, s);
  const double e = sign == Branch::plus ? std::exp(s) : -std::exp(s);
  const double a = p.alpha();
  const double c = amplitude(d, p);
  return -a * c * e / std::pow(den, a + 1.0) + a * (a + 1.0) * c * e * e / std::pow(den, a + 2.0);
}

namespace {

double extended_denominator(const ExtendedSolution& u, double x, double t) {
  if (!(std::abs(u.d0) < 1.0)) fail(ErrorKind::domain, "extended solution: evaluation needs |d0| < 1");
  const double den = u.T0 - t + u.d0 * (x - u.x_star);
  if (!(den > 0.0)) {
    std::ostringstream os;
    os << "extended solution evaluated outside t < T0 + d0 (x - x*): x=" << x << " t=" << t;
    fail(ErrorKind::domain, os.str());
  }
  return den;
}

}  // namespace

Cplx ExtendedSolution::value(double x, double t) const {
  const double den = extended_denominator(*this, x, t);
  return Cplx::polar(amplitude(d0, p) / std::pow(den, p.alpha()), theta0);
}

Cplx ExtendedSolution::dt(double x, double t) const {
  const double den = extended_denominator(*this, x, t);
  const double a = p.alpha();
  return Cplx::polar(a * amplitude(d0, p) / std::pow(den, a + 1.0), theta0);
}

Cplx ExtendedSolution::dx(double x, double t) const {
  const double den = extended_denominator(*this, x, t);
  const double a = p.alpha();
  return Cplx::polar(-a * d0 * amplitude(d0, p) / std::pow(den, a + 1.0), theta0);
}

ComplexField steady_residual(const CylinderGrid& grid, const ComplexField& w) {
  require_size(w.size(), grid.m(), "steady_residual");
  ComplexField zero(grid.m());
  ComplexField out(grid.m());
  // dws/ds of the cylinder equation at ws = 0 is exactly the steady residual
  kernels::serial::cylinder_accel(grid, w, zero, out);
  return out;
}

double stationary_residual(double d, double theta, const PowerParam& p, std::size_t m) {
  const CylinderGrid grid(m, p);
  return norm_L2rho(grid, steady_residual(grid, kappa_field(grid, d, theta)));
}

double connecting_residual(double d, Branch sign, double s, const PowerParam& p, std::size_t m) {
  const CylinderGrid grid(m, p);
  const auto y = grid.y();
  ComplexField w(m), ws(m), wss(m), out(m);
  for (std::size_t j = 0; j < m; ++j) {
    w.set(j, {connecting_solution(d, sign, y[j], s, p), 0.0});
    ws.set(j, {connecting_solution_ds(d, sign, y[j], s, p), 0.0});
    wss.set(j, {connecting_solution_dss(d, sign, y[j], s, p), 0.0});
  }
  kernels::serial::cylinder_accel(grid, w, ws, out);
  return norm_L2rho(grid, wss - out);
}

double extended_pde_residual(const ExtendedSolution& u, const Grid1D& grid, double t, double dt, double margin) {
  const double dx = grid.dx();
  const double q = 0.5 * (u.p.p() - 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double x = grid.x(i);
    const double lowest = std::min({u.blowup_time(x - dx), u.blowup_time(x), u.blowup_time(x + dx)});
    if (lowest - (t + dt) < margin) continue;
    const Cplx c = u.value(x, t);
    const Cplx utt = (1.0 / (dt * dt)) * (u.value(x, t + dt) - 2.0 * c + u.value(x, t - dt));
    const Cplx uxx = (1.0 / (dx * dx)) * (u.value(x + dx, t) - 2.0 * c + u.value(x - dx, t));
    const Cplx r = utt - uxx - std::pow(c.abs2(), q) * c;
    worst = std::max(worst, r.abs());
  }
  return worst;
}

}  // namespace blowup
