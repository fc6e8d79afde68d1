#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "blowup/physical.hpp"
#include "blowup/profile.hpp"
#include "blowup/selfsim.hpp"

namespace blowup {

enum class Verdict {
  decayed_to_family,
  decayed_to_zero,
  escaped,
  /// Bounded at s_end but not yet within tolerance of 0 or of the family.
  undecided,
};
const char* to_string(Verdict verdict);

struct TrappingSample {
  double s = 0.0;
  double residual = 0.0;
  double d = 0.0;
  double theta = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  bool am_flag = false;
};

struct TrappingOptions {
  /// <= 0 selects default_ds.
  double ds = 0.0;
  /// Fit and record every k-th step.
  std::size_t record_stride = 64;
  double escape_norm = 1e6;
  /// decayed_to_family needs residual < family_tolerance * ||kappa(d)||_H.
  double family_tolerance = 1e-3;
  /// decayed_to_zero needs ||(w, ws)||_H < zero_tolerance.
  double zero_tolerance = 1e-3;
  FitOptions fit;
  ExecPolicy policy = ExecPolicy::parallel;
};

struct TrappingReport {
  std::string description;
  std::vector<TrappingSample> series;
  Verdict verdict = Verdict::undecided;
  double final_s = 0.0;
  ProfileFit final_fit;
  double final_norm = 0.0;
  bool am_flag_raised = false;
  double am_first_s = std::numeric_limits<double>::quiet_NaN();
};

/// Evolves the cylinder equation to s_end, fits the family along the way and
/// classifies the end state. Escapes are a verdict, not an error.
TrappingReport trapping_experiment(const SelfSimState& initial, double s_end, const TrappingOptions& options = {},
                                   std::string description = {});

/// Unstable direction at e^{i theta} kappa(d, .): (phi, phi) with
/// phi = e^{i theta} kappa(d, y)/(1 + d y). It grows like e^s and corresponds
/// to moving the vertex time of the self-similar frame.
SelfSimState unstable_mode(const CylinderGrid& grid, double d, double theta);

struct ShootingOptions {
  /// Initial bracket [-bracket, bracket] for the mode coefficient.
  double bracket = 0.25;
  /// A trial that neither escapes nor decays by s_max ends the bisection.
  double s_max = 40.0;
  std::size_t max_iterations = 64;
  /// Stop once the bracket is narrower than this.
  double width_tolerance = 1e-13;
  double ds = 0.0;
  ExecPolicy policy = ExecPolicy::parallel;
};

struct PreparedData {
  SelfSimState state;
  double coefficient = 0.0;
  double bracket_width = 0.0;
  std::size_t iterations = 0;
};

/// Adds c times the unstable mode of e^{i theta} kappa(d, .) to `base`, with c
/// found by bisection between runs that escape (E < 0 or norm growth) and runs
/// that decay toward 0. The cylinder counterpart of choosing T0 = T(x0).
PreparedData prepare_trapped(const SelfSimState& base, double d, double theta, const ShootingOptions& options = {});

struct VanishingOptions {
  double x0 = 0.0;
  /// Window |x - x0| < horizon / 2, the half cone of a virtual blow-up time t + horizon.
  double horizon = 4.0;
  /// Times before this are excluded from the trend.
  double dispersion_time = 0.0;
};

struct VanishingSample {
  double t = 0.0;
  /// int_{|x-x0| < horizon/2} |u|^{p+1} dx.
  double mass = 0.0;
  /// horizon^{2(p+1)/(p-1) - 1} * mass = int_{-1/2}^{1/2} |w_{x0, t+horizon}|^{p+1} dy.
  double scaled = 0.0;
};

struct VanishingReport {
  bool applicable = true;
  std::string reason;
  std::vector<VanishingSample> samples;
  double max_mass = 0.0;
  double max_scaled = 0.0;
  /// Least-squares slope of mass against t after the dispersion time, divided by max_mass.
  double trend = 0.0;
  bool non_increasing = true;
};

/// Windowed L^{p+1} mass of a global run at the given times, read from the
/// latest stored snapshot at or before each time. Runs that blew up are
/// reported as not applicable.
VanishingReport vanishing_check(const EvolveResult& run, std::span<const double> times, const PowerParam& p,
                                const VanishingOptions& options = {});

}  // namespace blowup
