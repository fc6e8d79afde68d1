#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "blowup/physical.hpp"
#include "blowup/profile.hpp"

namespace blowup {

struct CurvePoint {
  double x = 0.0;
  double T = std::numeric_limits<double>::quiet_NaN();
  double d = std::numeric_limits<double>::quiet_NaN();
  /// In (-pi, pi].
  double theta_raw = std::numeric_limits<double>::quiet_NaN();
  double theta_unwrapped = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double r2_T = std::numeric_limits<double>::quiet_NaN();
  /// Self-similar time of the fitted snapshot.
  double s = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  /// Empty for a valid point.
  std::string skip_reason;

  bool valid() const { return skip_reason.empty(); }
};

struct BlowupCurve {
  std::vector<CurvePoint> points;
  Grid1D grid{-1.0, 1.0, 8};
  double p = 3.0;
  std::size_t m = 0;
  /// Set when phase_unwrap met a gap within its ambiguity band of pi.
  bool phase_ambiguous = false;

  std::vector<const CurvePoint*> valid_points() const;
};

/// Builds a curve from given samples (x strictly increasing); d and theta may be empty.
BlowupCurve make_curve(std::span<const double> x, std::span<const double> T, std::span<const double> d = {},
                       std::span<const double> theta = {});

struct CurveOptions {
  std::vector<double> xs;
  /// Solver controls; mode, probes and capture times are set by scan_curve.
  EvolveOptions evolve;
  EstimateOptions estimate;
  /// Cylinder resolution of the fits.
  std::size_t m = 256;
  FitOptions fit;
  /// Interpolation-safety cap on the self-similar capture: T - t_capture is at
  /// least the time at which the ODE profile reaches this modulus.
  double capture_cap = 1e4;
  /// T - t_capture is at least this many grid cells, so the cone is resolved.
  double min_cone_cells = 32.0;
};

/// Two masked solves over the same data: the first yields the traces and
/// T(x), the second captures one state per point for the self-similar fit.
/// Points whose backward cone leaves the domain are kept with a skip reason.
BlowupCurve scan_curve(const WaveState& initial, const PowerParam& p, const CurveOptions& options);

struct DerivativeCheck {
  /// |T'_num - d| per point; NaN where no centered difference exists.
  std::vector<double> gap;
  /// Centered-difference slope per point; NaN where undefined.
  std::vector<double> slope;
  double max_gap = 0.0;
};

/// Centered differences of T over consecutive valid points against the fitted d.
DerivativeCheck check_derivative(const BlowupCurve& curve);

/// T(x) >= T(x0) - delta |x - x0| at every valid point with |x - x0| <= window.
/// x0 snaps to the nearest valid point.
bool noncharacteristic_test(const BlowupCurve& curve, double x0, double delta,
                            double window = std::numeric_limits<double>::infinity());

struct SlopeBound {
  bool ok = false;
  /// max |T(x) - T(y)| / |x - y| over valid pairs in the window.
  double worst_slope = 0.0;
  /// (1 + |d(x0)|) / 2.
  double bound = 0.0;
  double ratio = 0.0;
  /// Same comparison against 1 + |d(x0)|.
  double bound_loose = 0.0;
  double ratio_loose = 0.0;
  bool ok_loose = false;
};

SlopeBound slope_bound_check(const BlowupCurve& curve, double x0, double eta);

/// max |Delta T| / |Delta x| over consecutive valid points.
double lipschitz_ratio(const BlowupCurve& curve);

struct HolderOptions {
  /// Pairs with |f(x) - f(x0)| <= noise_floor are excluded. Negative selects
  /// the default of curve_holder (10 x median fit residual), or 0 elsewhere.
  double noise_floor = -1.0;
  /// Pair-distance window.
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
  std::size_t min_pairs = 6;
};

struct HolderEstimate {
  double x0 = 0.0;
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double constant = std::numeric_limits<double>::quiet_NaN();
  double r_lo = 0.0;
  double r_hi = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
  /// Every pair is below the noise floor: consistent with any exponent.
  bool flat = false;
};

/// Log-log regression of |f(x) - f(x0)| against |x - x0|. x must be strictly
/// increasing and contain x0 exactly.
HolderEstimate holder_exponent(std::span<const double> x, std::span<const double> f, double x0,
                               const HolderOptions& options = {});

enum class HolderField { theta, slope };
const char* to_string(HolderField field);

/// holder_exponent on the unwrapped phase or on the centered-difference T'
/// of the valid points. x0 snaps to the nearest point carrying the field.
HolderEstimate curve_holder(const BlowupCurve& curve, HolderField field, double x0, HolderOptions options = {});

struct Unwrapped {
  std::vector<double> values;
  /// Index i is set when the raw gap into element i was within the band of pi.
  std::vector<bool> ambiguous;
};

/// Gap-by-gap unwrapping: each step picks the 2 pi shift with the smallest
/// gap. Gaps within `band` of pi are flagged and left unshifted.
Unwrapped phase_unwrap(std::span<const double> thetas, double band = 1e-3);

}  // namespace blowup
