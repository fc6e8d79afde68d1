#include "blowup/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blowup {

SelfSimState::SelfSimState(double s_, CylinderGrid grid_, ComplexField w_, ComplexField ws_)
    : s(s_), grid(std::move(grid_)), w(std::move(w_)), ws(std::move(ws_)) {
  require_size(w.size(), grid.m(), "SelfSimState w");
  require_size(ws.size(), grid.m(), "SelfSimState ws");
}

namespace {

struct Stencil {
  std::size_t idx[4];
  double weight[4];
};

/// 4-point Lagrange stencil around x on the periodic grid.
Stencil lagrange_stencil(const Grid1D& grid, double x) {
  const double xi = (x - grid.xmin()) / grid.dx();
  const double base = std::floor(xi);
  const double r = xi - base;  // in [0, 1)
  const auto n = static_cast<long long>(grid.n());
  const long long i0 = static_cast<long long>(base);
  Stencil st{};
  const double nodes[4] = {-1.0, 0.0, 1.0, 2.0};
  for (int k = 0; k < 4; ++k) {
    const long long idx = ((i0 - 1 + k) % n + n) % n;
    st.idx[k] = static_cast<std::size_t>(idx);
    double wgt = 1.0;
    for (int l = 0; l < 4; ++l) {
      if (l != k) wgt *= (r - nodes[l]) / (nodes[k] - nodes[l]);
    }
    st.weight[k] = wgt;
  }
  return st;
}

Cplx interpolate(const ComplexField& f, const Stencil& st) {
  Cplx z;
  for (int k = 0; k < 4; ++k) z = z + st.weight[k] * f[st.idx[k]];
  return z;
}

}  // namespace

SelfSimState to_selfsimilar(const WaveState& u, double x0, double T0, const CylinderGrid& grid) {
  const double tau = T0 - u.t;
  if (!(tau > 0.0)) fail(ErrorKind::domain, "to_selfsimilar needs t < T0");
  const Grid1D& g = u.grid;
  const std::size_t n = g.n();
  const double a = grid.power().alpha();

  ComplexField ux(n);
  const double inv2dx = 0.5 / g.dx();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    const std::size_t r = i == n - 1 ? 0 : i + 1;
    ux.set(i, inv2dx * (u.u[r] - u.u[l]));
  }

  const auto y = grid.y();
  const std::size_t m = grid.m();
  ComplexField w(m), ws(m);
  const double scale = std::pow(tau, a);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = x0 + y[j] * tau;
    if (!(x >= g.xmin() && x < g.xmax())) {
      std::ostringstream os;
      os << "to_selfsimilar: cylinder node y=" << y[j] << " maps to x=" << x << " outside ["
         << g.xmin() << ", " << g.xmax() << ")";
      fail(ErrorKind::out_of_cone, os.str());
    }
    const Stencil st = lagrange_stencil(g, x);
    const Cplx wj = scale * interpolate(u.u, st);
    const Cplx dt_part = interpolate(u.v, st) - y[j] * interpolate(ux, st);
    w.set(j, wj);
    ws.set(j, (scale * tau) * dt_part - a * wj);
  }
  return {-std::log(tau), grid, std::move(w), std::move(ws)};
}

SelfSimRate rhs(const SelfSimState& state, ExecPolicy policy) {
  SelfSimRate out{state.ws, ComplexField(state.grid.m())};
  kernels::cylinder_accel(policy, state.grid, state.w, state.ws, out.dws);
  return out;
}

double default_ds(const CylinderGrid& grid) { return 0.5 * grid.h(); }

CylinderIntegrator::CylinderIntegrator(const CylinderGrid& grid, ExecPolicy policy)
    : grid_(grid),
      policy_(policy),
      k1w_(grid.m()), k1v_(grid.m()), k2w_(grid.m()), k2v_(grid.m()), k3w_(grid.m()),
      k3v_(grid.m()), k4w_(grid.m()), k4v_(grid.m()), tw_(grid.m()), tv_(grid.m()) {}

void CylinderIntegrator::step(SelfSimState& st, double ds) {
  using kernels::axpy;
  using kernels::cylinder_accel;
  // k1
  k1w_ = st.ws;
  cylinder_accel(policy_, grid_, st.w, st.ws, k1v_);
  // k2
  axpy(policy_, st.w, 0.5 * ds, k1w_, tw_);
  axpy(policy_, st.ws, 0.5 * ds, k1v_, tv_);
  k2w_ = tv_;
  cylinder_accel(policy_, grid_, tw_, tv_, k2v_);
  // k3
  axpy(policy_, st.w, 0.5 * ds, k2w_, tw_);
  axpy(policy_, st.ws, 0.5 * ds, k2v_, tv_);
  k3w_ = tv_;
  cylinder_accel(policy_, grid_, tw_, tv_, k3v_);
  // k4
  axpy(policy_, st.w, ds, k3w_, tw_);
  axpy(policy_, st.ws, ds, k3v_, tv_);
  k4w_ = tv_;
  cylinder_accel(policy_, grid_, tw_, tv_, k4v_);

  const double c = ds / 6.0;
  auto combine = [&](ComplexField& x, const ComplexField& a, const ComplexField& b, const ComplexField& cc,
                     const ComplexField& d) {
    auto xr = x.re();
    auto xi = x.im();
    for (std::size_t j = 0; j < x.size(); ++j) {
      xr[j] += c * (a.re()[j] + 2.0 * b.re()[j] + 2.0 * cc.re()[j] + d.re()[j]);
      xi[j] += c * (a.im()[j] + 2.0 * b.im()[j] + 2.0 * cc.im()[j] + d.im()[j]);
    }
  };
  combine(st.w, k1w_, k2w_, k3w_, k4w_);
  combine(st.ws, k1v_, k2v_, k3v_, k4v_);
  st.s += ds;
}

Trajectory evolve_w(const SelfSimState& initial, double s_end, const EvolveWOptions& opt) {
  require_finite(initial.w, "evolve_w initial w");
  require_finite(initial.ws, "evolve_w initial ws");
  const double ds = opt.ds > 0.0 ? opt.ds : default_ds(initial.grid);
  const std::size_t stride = std::max<std::size_t>(opt.stride, 1);
  Trajectory traj{initial};
  if (!(s_end > initial.s)) return traj;

  const auto steps = static_cast<std::size_t>(std::ceil((s_end - initial.s) / ds - 1e-9));
  SelfSimState st = initial;
  CylinderIntegrator rk(initial.grid, opt.policy);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double h = k == steps ? s_end - st.s : ds;
    rk.step(st, h);
    if (k == steps) st.s = s_end;
    const bool finite = st.w.all_finite() && st.ws.all_finite();
    if (!finite || norm_H(st.grid, st.w, st.ws) > opt.escape_norm) {
      std::ostringstream os;
      os << "evolve_w diverged at s=" << st.s << " (ds=" << ds << ")";
      fail(ErrorKind::divergence, os.str());
    }
    if (k % stride == 0 || k == steps) traj.push_back(st);
  }
  return traj;
}

double energy(const SelfSimState& st) {
  const CylinderGrid& grid = st.grid;
  const PowerParam& p = grid.power();
  const std::size_t m = grid.m();
  const double c = 0.5 * p.mass();
  std::vector<double> f(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double r2 = st.w[j].abs2();
    f[j] = 0.5 * st.ws[j].abs2() + c * r2 - std::pow(r2, 0.5 * (p.p() + 1.0)) / (p.p() + 1.0);
  }
  const auto flux = grid.flux_coeff();
  double grad = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) grad += flux[j] * (st.w[j + 1] - st.w[j]).abs2();
  grad /= grid.h();
  return quad_rho(grid, f) + 0.5 * grad;
}

double dissipation_rate(const SelfSimState& st) {
  std::vector<double> f(st.grid.m());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = st.ws[j].abs2();
  return quad_dissipation(st.grid, f);
}

EnergyTrace energy_trace(const Trajectory& traj) {
  EnergyTrace out;
  if (traj.empty()) return out;
  const PowerParam& p = traj.front().grid.power();
  const double coef = 4.0 / (p.p() - 1.0);
  const double E0 = energy(traj.front());
  double D = 0.0;
  double prev_rate = dissipation_rate(traj.front());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const SelfSimState& st = traj[k];
    const double rate = dissipation_rate(st);
    if (k > 0) D += 0.5 * (st.s - traj[k - 1].s) * (prev_rate + rate);
    prev_rate = rate;
    const double E = energy(st);
    out.samples.push_back({st.s, E, D, std::abs(E - E0 + coef * D) / (std::abs(E0) + 1e-12)});

    if (p.p() > 3.0 && rate > 0.0) {
      const std::size_t m = st.grid.m();
      const auto wgt = st.grid.dissipation_weight();
      const double edge = (st.ws[0].abs2() * wgt[0] + st.ws[m - 1].abs2() * wgt[m - 1]) * st.grid.h();
      if (edge > 0.1 * rate) out.resolution_warning = true;
    }
  }
  return out;
}

double dissipation_residual(const Trajectory& traj) {
  if (traj.size() < 2) fail(ErrorKind::insufficient_data, "dissipation_residual needs two states");
  return energy_trace(traj).samples.back().residual;
}

bool am_monitor(const SelfSimState& state) { return energy(state) < 0.0; }

double lp_half_mass(const SelfSimState& st) {
  const double e = 0.5 * (st.grid.power().p() + 1.0);
  const auto y = st.grid.y();
  double s = 0.0;
  for (std::size_t j = 0; j < st.grid.m(); ++j) {
    if (std::abs(y[j]) < 0.5) s += std::pow(st.w[j].abs2(), e);
  }
  return s * st.grid.h();
}

}  // namespace blowup
