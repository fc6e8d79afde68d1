#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "blowup/kernels.hpp"
#include "blowup/numerics.hpp"
#include "blowup/stationary.hpp"

namespace blowup {

/// Snapshot (t, u, u_t) of the wave equation on a periodic grid.
struct WaveState {
  double t = 0.0;
  Grid1D grid;
  ComplexField u;
  ComplexField v;

  WaveState(double t, Grid1D grid, ComplexField u, ComplexField v);

  WaveState rotated(double alpha) const { return {t, grid, u.rotated(alpha), v.rotated(alpha)}; }
  WaveState times_i() const { return {t, grid, u.times_i(), v.times_i()}; }
};

struct TraceSample {
  double t;
  double modulus;
};

/// Time series of |u(x0, t)| at one grid node.
struct PointTrace {
  double x0 = 0.0;
  std::size_t node = 0;
  std::vector<TraceSample> samples;
};

enum class StopCause { threshold, nan, max_steps, time_limit };
const char* to_string(StopCause cause);

struct BlowupEvent {
  double t_stop = 0.0;
  double peak_modulus = 0.0;
  StopCause cause = StopCause::max_steps;

  bool blew_up() const { return cause == StopCause::threshold || cause == StopCause::nan; }
};

/// One leapfrog (kick-drift-kick Stormer-Verlet) step of u_tt = u_xx + |u|^{p-1} u.
/// Requires dt <= 0.9 dx. Non-finite output is reported by `evolve`, not here.
WaveState step(const WaveState& state, double dt, const PowerParam& p,
               ExecPolicy policy = ExecPolicy::parallel);

/// min(cfl dx, amp_factor (1 + max|u|)^{-(p-1)/2}); the maximum skips masked nodes.
double adaptive_dt(const WaveState& state, double cfl, double amp_factor, const PowerParam& p,
                   kernels::AliveMask alive = {});

enum class StopMode {
  /// Stop at the first step where max|u| reaches the threshold.
  global,
  /// Freeze nodes whose modulus reaches the threshold and continue until every
  /// probe node is frozen. Used to follow a blow-up curve across x.
  masked,
};

struct EvolveOptions {
  double threshold = 1e6;
  std::size_t max_steps = 2'000'000;
  double cfl = 0.5;
  double amp_factor = 0.02;
  double t_end = std::numeric_limits<double>::infinity();
  StopMode mode = StopMode::global;
  /// Probe positions (snapped to the nearest node) recorded every step.
  std::vector<double> probes;
  /// Keep every k-th state (0 keeps none).
  std::size_t snapshot_stride = 0;
  /// For each entry, keep the last state with t <= capture time.
  std::vector<double> capture_times;
  ExecPolicy policy = ExecPolicy::parallel;
};

struct EvolveResult {
  WaveState final_state;
  BlowupEvent event;
  std::vector<PointTrace> traces;
  std::vector<WaveState> snapshots;
  std::vector<std::optional<WaveState>> captures;
  /// Freeze time per node in masked mode (infinity while alive).
  std::vector<double> freeze_time;
  std::size_t steps = 0;
};

EvolveResult evolve(const WaveState& initial, const PowerParam& p, const EvolveOptions& options);

struct EstimateOptions {
  double floor = 1e2;
  double cap = std::numeric_limits<double>::infinity();
  std::size_t min_samples = 10;
};

struct TimeEstimate {
  double T_hat = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
};

/// Blow-up time above a point from the rate law: g = |u|^{-(p-1)/2} is
/// asymptotically linear in t with root T(x0). Fits a line to the samples
/// whose modulus lies in [floor, cap].
TimeEstimate estimate_T(const PointTrace& trace, const PowerParam& p, const EstimateOptions& options = {});

// ---- initial data -------------------------------------------------------

WaveState constant_data(const Grid1D& grid, Cplx u0, Cplx u1);

struct GaussianSpec {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  double velocity_amplitude = 0.0;
  double phase = 0.0;
};
WaveState gaussian_data(const Grid1D& grid, const GaussianSpec& spec);

/// Smooth compactly supported cutoff: 1 on [lo, hi], 0 outside
/// [lo - width, hi + width], C-infinity in between.
struct Taper {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double width = 0.5;

  double operator()(double x) const;
};

/// The explicit solution sampled at t = 0, multiplied by the taper.
WaveState profile_data(const Grid1D& grid, const ExtendedSolution& solution, const Taper& taper);

}  // namespace blowup
