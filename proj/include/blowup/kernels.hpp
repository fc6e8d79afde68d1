#pragma once

// Pointwise data-parallel kernels. Every kernel exists as a serial reference
// and an OpenMP variant; both call the same per-node body and perform no
// reductions, so their outputs are bit-identical.

#include <cstdint>
#include <span>

#include "blowup/numerics.hpp"

namespace blowup {

enum class ExecPolicy { serial, parallel };

/// True when the library was built with OpenMP.
bool openmp_enabled();

namespace kernels {

/// Nodes marked 0 are frozen (blown up): no update, zero acceleration.
using AliveMask = std::span<const std::uint8_t>;

namespace serial {
/// a = u_xx + |u|^{p-1} u on a periodic grid (second-order Laplacian).
void wave_accel(const Grid1D& grid, const PowerParam& p, const ComplexField& u, AliveMask alive,
                ComplexField& a);
/// v += c * a on alive nodes.
void kick(ComplexField& v, const ComplexField& a, double c, AliveMask alive);
/// u += dt * v on alive nodes.
void drift(ComplexField& u, const ComplexField& v, double dt, AliveMask alive);
/// dws/ds of the cylinder equation.
void cylinder_accel(const CylinderGrid& grid, const ComplexField& w, const ComplexField& ws,
                    ComplexField& out);
/// out = x + c * y.
void axpy(const ComplexField& x, double c, const ComplexField& y, ComplexField& out);
}  // namespace serial

namespace omp {
void wave_accel(const Grid1D& grid, const PowerParam& p, const ComplexField& u, AliveMask alive,
                ComplexField& a);
void kick(ComplexField& v, const ComplexField& a, double c, AliveMask alive);
void drift(ComplexField& u, const ComplexField& v, double dt, AliveMask alive);
void cylinder_accel(const CylinderGrid& grid, const ComplexField& w, const ComplexField& ws,
                    ComplexField& out);
void axpy(const ComplexField& x, double c, const ComplexField& y, ComplexField& out);
}  // namespace omp

inline void wave_accel(ExecPolicy policy, const Grid1D& grid, const PowerParam& p, const ComplexField& u,
                       AliveMask alive, ComplexField& a) {
  policy == ExecPolicy::parallel ? omp::wave_accel(grid, p, u, alive, a)
                                 : serial::wave_accel(grid, p, u, alive, a);
}

inline void kick(ExecPolicy policy, ComplexField& v, const ComplexField& a, double c, AliveMask alive) {
  policy == ExecPolicy::parallel ? omp::kick(v, a, c, alive) : serial::kick(v, a, c, alive);
}

inline void drift(ExecPolicy policy, ComplexField& u, const ComplexField& v, double dt, AliveMask alive) {
  policy == ExecPolicy::parallel ? omp::drift(u, v, dt, alive) : serial::drift(u, v, dt, alive);
}

inline void cylinder_accel(ExecPolicy policy, const CylinderGrid& grid, const ComplexField& w,
                           const ComplexField& ws, ComplexField& out) {
  policy == ExecPolicy::parallel ? omp::cylinder_accel(grid, w, ws, out)
                                 : serial::cylinder_accel(grid, w, ws, out);
}

inline void axpy(ExecPolicy policy, const ComplexField& x, double c, const ComplexField& y, ComplexField& out) {
  policy == ExecPolicy::parallel ? omp::axpy(x, c, y, out) : serial::axpy(x, c, y, out);
}

}  // namespace kernels
}  // namespace blowup
