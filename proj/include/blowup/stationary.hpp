#pragma once

#include "blowup/numerics.hpp"

namespace blowup {

/// Amplitude of the constant stationary profile, (2(p+1)/(p-1)^2)^{1/(p-1)}.
double kappa0(const PowerParam& p);

/// Stationary profile kappa0 (1-d^2)^{1/(p-1)} / (1+d y)^{2/(p-1)}; requires |d| < 1.
double kappa(double d, double y, const PowerParam& p);

/// d/dd of kappa at fixed y (the modulation direction of the family).
double kappa_dd(double d, double y, const PowerParam& p);

/// e^{i theta} kappa(d, .) sampled on the cylinder nodes.
ComplexField kappa_field(const CylinderGrid& grid, double d, double theta = 0.0);

enum class Branch { plus, minus };

/// Connecting solutions kappa0 (1-d^2)^{1/(p-1)} / (1 +- e^s + d y)^{2/(p-1)}.
/// Throws a domain error when the denominator is not positive.
double connecting_solution(double d, Branch sign, double y, double s, const PowerParam& p);
double connecting_solution_ds(double d, Branch sign, double y, double s, const PowerParam& p);
double connecting_solution_dss(double d, Branch sign, double y, double s, const PowerParam& p);

/// Explicit solution on {t < T0 + d0 (x - x_star)}:
/// e^{i theta0} kappa0 (1-d0^2)^{1/(p-1)} / (T0 - t + d0 (x - x_star))^{2/(p-1)}.
struct ExtendedSolution {
  double theta0 = 0.0;
  double d0 = 0.0;
  double T0 = 1.0;
  double x_star = 0.0;
  PowerParam p{3.0};

  /// Blow-up time above x.
  double blowup_time(double x) const { return T0 + d0 * (x - x_star); }
  Cplx value(double x, double t) const;
  /// Time derivative u_t.
  Cplx dt(double x, double t) const;
  /// Space derivative u_x.
  Cplx dx(double x, double t) const;
};

/// Discrete residual L kappa - mass kappa + |kappa|^{p-1} kappa of a cylinder
/// field, using the same conservative operator as the cylinder solver.
ComplexField steady_residual(const CylinderGrid& grid, const ComplexField& w);

/// L^2_rho norm of the steady residual of e^{i theta} kappa(d, .) on m nodes.
double stationary_residual(double d, double theta, const PowerParam& p, std::size_t m);

/// L^2_rho norm of d^2w/ds^2 minus the discrete cylinder right-hand side for
/// the connecting solution w_{sign} at time s.
double connecting_residual(double d, Branch sign, double s, const PowerParam& p, std::size_t m);

/// Max-norm leapfrog residual of the sampled explicit solution at time t:
/// centered second differences in t and x minus the nonlinearity. Nodes closer
/// than `margin` (in t) to the singular line are skipped.
double extended_pde_residual(const ExtendedSolution& u, const Grid1D& grid, double t, double dt,
                             double margin = 0.5);

}  // namespace blowup
