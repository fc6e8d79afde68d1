#pragma once

// Per-node kernel bodies shared by the serial and OpenMP loops.

#include <cmath>
#include <cstdint>

#include "blowup/kernels.hpp"

namespace blowup::kernels::detail {

/// |z|^{p-1} with the convention 0^{p-1} = 0.
inline double modulus_power(double re, double im, double half_pm1) {
  const double r2 = re * re + im * im;
  if (half_pm1 == 1.0) return r2;
  return r2 > 0.0 ? std::pow(r2, half_pm1) : 0.0;
}

inline bool is_alive(AliveMask alive, std::ptrdiff_t i) {
  return alive.empty() || alive[static_cast<std::size_t>(i)] != 0;
}

struct WaveView {
  const double* ur;
  const double* ui;
  double* ar;
  double* ai;
  std::ptrdiff_t n;
  double inv_dx2;
  double half_pm1;
  AliveMask alive;

  void operator()(std::ptrdiff_t i) const {
    if (!is_alive(alive, i)) {
      ar[i] = 0.0;
      ai[i] = 0.0;
      return;
    }
    const std::ptrdiff_t l = i == 0 ? n - 1 : i - 1;
    const std::ptrdiff_t r = i == n - 1 ? 0 : i + 1;
    const double g = modulus_power(ur[i], ui[i], half_pm1);
    if (!is_alive(alive, l) || !is_alive(alive, r)) {
      // next to a frozen node the profile is unresolved: local ODE only
      ar[i] = g * ur[i];
      ai[i] = g * ui[i];
      return;
    }
    ar[i] = (ur[l] - 2.0 * ur[i] + ur[r]) * inv_dx2 + g * ur[i];
    ai[i] = (ui[l] - 2.0 * ui[i] + ui[r]) * inv_dx2 + g * ui[i];
  }
};

struct UpdateView {
  double* xr;
  double* xi;
  const double* yr;
  const double* yi;
  double c;
  AliveMask alive;

  void operator()(std::ptrdiff_t i) const {
    if (!is_alive(alive, i)) return;
    xr[i] += c * yr[i];
    xi[i] += c * yi[i];
  }
};

struct AxpyView {
  const double* xr;
  const double* xi;
  const double* yr;
  const double* yi;
  double* outr;
  double* outi;
  double c;

  void operator()(std::ptrdiff_t i) const {
    outr[i] = xr[i] + c * yr[i];
    outi[i] = xi[i] + c * yi[i];
  }
};

/// dws/ds = L w - mass w + |w|^{p-1} w - damping ws - 2 y d_y ws.
///
/// L w = (F_{j+1/2} - F_{j-1/2}) / (h rho_j), F = rho (1-y^2) (w_{j+1} - w_j) / h,
/// with zero flux through y = +-1 where rho (1-y^2) vanishes.
struct CylinderView {
  const double* wr;
  const double* wi;
  const double* vr;
  const double* vi;
  double* outr;
  double* outi;
  const double* y;
  const double* rho;
  const double* flux;
  std::ptrdiff_t m;
  double h;
  double mass;
  double damping;
  double half_pm1;

  void operator()(std::ptrdiff_t j) const {
    const double inv_h2 = 1.0 / (h * h);
    double fr_hi = 0.0, fi_hi = 0.0, fr_lo = 0.0, fi_lo = 0.0;
    if (j + 1 < m) {
      fr_hi = flux[j] * (wr[j + 1] - wr[j]);
      fi_hi = flux[j] * (wi[j + 1] - wi[j]);
    }
    if (j > 0) {
      fr_lo = flux[j - 1] * (wr[j] - wr[j - 1]);
      fi_lo = flux[j - 1] * (wi[j] - wi[j - 1]);
    }
    const double lr = (fr_hi - fr_lo) * inv_h2 / rho[j];
    const double li = (fi_hi - fi_lo) * inv_h2 / rho[j];

    double dvr, dvi;
    const double inv2h = 0.5 / h;
    if (j == 0) {
      dvr = (-3.0 * vr[0] + 4.0 * vr[1] - vr[2]) * inv2h;
      dvi = (-3.0 * vi[0] + 4.0 * vi[1] - vi[2]) * inv2h;
    } else if (j == m - 1) {
      dvr = (3.0 * vr[j] - 4.0 * vr[j - 1] + vr[j - 2]) * inv2h;
      dvi = (3.0 * vi[j] - 4.0 * vi[j - 1] + vi[j - 2]) * inv2h;
    } else {
      dvr = (vr[j + 1] - vr[j - 1]) * inv2h;
      dvi = (vi[j + 1] - vi[j - 1]) * inv2h;
    }
    const double g = modulus_power(wr[j], wi[j], half_pm1);
    outr[j] = lr - mass * wr[j] + g * wr[j] - damping * vr[j] - 2.0 * y[j] * dvr;
    outi[j] = li - mass * wi[j] + g * wi[j] - damping * vi[j] - 2.0 * y[j] * dvi;
  }
};

inline WaveView make_wave(const Grid1D& grid, const PowerParam& p, const ComplexField& u, AliveMask alive,
                          ComplexField& a) {
  require_size(u.size(), grid.n(), "wave_accel input");
  require_size(a.size(), grid.n(), "wave_accel output");
  if (!alive.empty()) require_size(alive.size(), grid.n(), "wave_accel mask");
  const double dx = grid.dx();
  return {u.re().data(), u.im().data(), a.re().data(), a.im().data(),
          static_cast<std::ptrdiff_t>(grid.n()), 1.0 / (dx * dx), 0.5 * (p.p() - 1.0), alive};
}

inline UpdateView make_update(ComplexField& x, const ComplexField& y, double c, AliveMask alive) {
  require_size(y.size(), x.size(), "update");
  if (!alive.empty()) require_size(alive.size(), x.size(), "update mask");
  return {x.re().data(), x.im().data(), y.re().data(), y.im().data(), c, alive};
}

inline AxpyView make_axpy(const ComplexField& x, double c, const ComplexField& y, ComplexField& out) {
  require_size(y.size(), x.size(), "axpy");
  require_size(out.size(), x.size(), "axpy output");
  return {x.re().data(), x.im().data(), y.re().data(), y.im().data(), out.re().data(), out.im().data(), c};
}

inline CylinderView make_cylinder(const CylinderGrid& grid, const ComplexField& w, const ComplexField& ws,
                                  ComplexField& out) {
  require_size(w.size(), grid.m(), "cylinder_accel w");
  require_size(ws.size(), grid.m(), "cylinder_accel ws");
  require_size(out.size(), grid.m(), "cylinder_accel output");
  const PowerParam& p = grid.power();
  return {w.re().data(),  w.im().data(),     ws.re().data(),     ws.im().data(),
          out.re().data(), out.im().data(),  grid.y().data(),    grid.rho().data(),
          grid.flux_coeff().data(), static_cast<std::ptrdiff_t>(grid.m()), grid.h(), p.mass(),
          p.damping(), 0.5 * (p.p() - 1.0)};
}

}  // namespace blowup::kernels::detail
