#pragma once

#include <limits>
#include <span>

#include "blowup/selfsim.hpp"

namespace blowup {

struct ProfileFit {
  double d = 0.0;
  /// In (-pi, pi].
  double theta = 0.0;
  /// Energy-space distance to (e^{i theta} kappa(d, .), 0).
  double residual = 0.0;
  /// Same distance in the unweighted H^1 x L^2 norm.
  double residual_h1l2 = 0.0;
  double s = 0.0;
  /// ||kappa(d)||_H of the fitted member.
  double kappa_norm = 0.0;
  bool converged = false;
};

struct FitOptions {
  double d_lo = -0.995;
  double d_hi = 0.995;
  std::size_t prescan = 64;
  double tolerance = 1e-12;
  /// A fit is usable when residual <= converged_ratio * ||kappa(d)||_H.
  double converged_ratio = 0.5;
};

/// Phase of <w, kappa(d, .)>_{L^2_rho}: the L^2_rho-optimal rotation at fixed d.
double fit_theta(const CylinderGrid& grid, const ComplexField& w, double d);

/// Joint (d, theta) fit against the stationary family: 64-point prescan of d,
/// then golden-section on the bracket around the best prescan point.
ProfileFit fit_profile(const SelfSimState& snapshot, const FitOptions& options = {});

/// Energy-space distance of a state to (e^{i theta} kappa(d, .), 0).
double family_distance(const SelfSimState& state, double d, double theta);

struct RateFit {
  double mu_hat = 0.0;
  double c_hat = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
};

struct RateOptions {
  /// Residuals at or below the floor are discarded. Negative selects
  /// max(10 eps ||kappa(d)||_H, 10 * smallest residual), which drops the
  /// tail where the discretization error saturates.
  double floor = -1.0;
  double s_lo = -std::numeric_limits<double>::infinity();
  double s_hi = std::numeric_limits<double>::infinity();
  std::size_t min_fits = 5;
};

/// Least squares of log(residual) against s: residual ~ c_hat e^{-mu_hat s}.
RateFit estimate_rate(std::span<const ProfileFit> fits, const RateOptions& options = {});

}  // namespace blowup
