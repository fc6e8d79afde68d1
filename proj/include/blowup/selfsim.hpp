#pragma once

#include <vector>

#include "blowup/kernels.hpp"
#include "blowup/numerics.hpp"
#include "blowup/physical.hpp"

namespace blowup {

/// Snapshot (s, w, dw/ds) on the cylinder (-1, 1).
struct SelfSimState {
  double s = 0.0;
  CylinderGrid grid;
  ComplexField w;
  ComplexField ws;

  SelfSimState(double s, CylinderGrid grid, ComplexField w, ComplexField ws);

  SelfSimState rotated(double alpha) const { return {s, grid, w.rotated(alpha), ws.rotated(alpha)}; }
  /// (w(-y), ws(-y)).
  SelfSimState reflected() const { return {s, grid, w.reversed(), ws.reversed()}; }
};

using Trajectory = std::vector<SelfSimState>;

/// w(y, s) = (T0-t)^{2/(p-1)} u(x0 + y (T0-t), t), s = -log(T0-t).
///
/// u, u_t and the centered-difference u_x are sampled with 4-point Lagrange
/// interpolation. Throws out_of_cone when a cylinder node maps outside the
/// physical grid and domain when t >= T0.
SelfSimState to_selfsimilar(const WaveState& u, double x0, double T0, const CylinderGrid& grid);

struct SelfSimRate {
  ComplexField dw;
  ComplexField dws;
};

/// Right-hand side of the cylinder equation as a first-order system.
SelfSimRate rhs(const SelfSimState& state, ExecPolicy policy = ExecPolicy::parallel);

/// 0.5 h: half the measured RK4 stability limit of the discrete operator.
double default_ds(const CylinderGrid& grid);

/// Classical RK4 in s with preallocated stage buffers.
class CylinderIntegrator {
 public:
  explicit CylinderIntegrator(const CylinderGrid& grid, ExecPolicy policy = ExecPolicy::parallel);

  void step(SelfSimState& state, double ds);

 private:
  CylinderGrid grid_;
  ExecPolicy policy_;
  ComplexField k1w_, k1v_, k2w_, k2v_, k3w_, k3v_, k4w_, k4v_, tw_, tv_;
};

struct EvolveWOptions {
  /// Step size; <= 0 selects default_ds.
  double ds = 0.0;
  /// Record every k-th state (the initial and final states are always kept).
  std::size_t stride = 1;
  double escape_norm = 1e6;
  ExecPolicy policy = ExecPolicy::parallel;
};

/// Integrates to s_end. Throws a divergence error when the energy-space norm
/// exceeds escape_norm or samples stop being finite.
Trajectory evolve_w(const SelfSimState& initial, double s_end, const EvolveWOptions& options = {});

/// Lyapunov functional int (|ws|^2/2 + |w_y|^2 (1-y^2)/2 + (p+1)/(p-1)^2 |w|^2 - |w|^{p+1}/(p+1)) rho dy.
/// The gradient term uses the staggered differences of the conservative operator.
double energy(const SelfSimState& state);

/// int |ws|^2 rho/(1-y^2) dy.
double dissipation_rate(const SelfSimState& state);

struct EnergySample {
  double s;
  double E;
  /// Trapezoid-accumulated dissipation integral from the first sample.
  double D;
  /// |E - E_0 + 4/(p-1) D| / (|E_0| + eps).
  double residual;
};

struct EnergyTrace {
  std::vector<EnergySample> samples;
  /// Set for p > 3 when the outermost cells carry > 10% of a dissipation integral.
  bool resolution_warning = false;
};

EnergyTrace energy_trace(const Trajectory& traj);

/// Relative defect of the dissipation identity over the whole trajectory.
double dissipation_residual(const Trajectory& traj);

/// True when E < 0: the solution cannot be global in s.
bool am_monitor(const SelfSimState& state);

/// int_{-1/2}^{1/2} |w|^{p+1} dy (midpoint sum over nodes with |y| < 1/2).
double lp_half_mass(const SelfSimState& state);

}  // namespace blowup
