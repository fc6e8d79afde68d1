#include "blowup/numerics.hpp"

#include <algorithm>
#include <sstream>

namespace blowup {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::size: return "size";
    case ErrorKind::invalid_data: return "invalid-data";
    case ErrorKind::domain: return "domain";
    case ErrorKind::out_of_cone: return "out-of-cone";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::undefined_phase: return "undefined-phase";
    case ErrorKind::rate_undefined: return "rate-undefined";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": length " << got << " does not match grid size " << want;
    fail(ErrorKind::size, os.str());
  }
}

void require_finite(const ComplexField& f, const char* what) {
  if (!f.all_finite()) fail(ErrorKind::invalid_data, std::string(what) + ": non-finite sample");
}

PowerParam::PowerParam(double p) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p)) fail(ErrorKind::domain, "power p must be finite and > 1");
  alpha_ = 2.0 / (p - 1.0);
  mass_ = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
  damping_ = (p + 3.0) / (p - 1.0);
}

Grid1D::Grid1D(double xmin, double xmax, std::size_t n) : xmin_(xmin), xmax_(xmax), n_(n) {
  if (n < 8) fail(ErrorKind::domain, "Grid1D needs n >= 8");
  if (!(xmax > xmin) || !std::isfinite(xmin) || !std::isfinite(xmax))
    fail(ErrorKind::domain, "Grid1D needs finite xmin < xmax");
  dx_ = (xmax - xmin) / static_cast<double>(n);
}

std::size_t Grid1D::nearest(double x) const {
  double k = std::round((x - xmin_) / dx_);
  k = std::clamp(k, 0.0, static_cast<double>(n_ - 1));
  return static_cast<std::size_t>(k);
}

ComplexField::ComplexField(std::vector<double> re, std::vector<double> im)
    : re_(std::move(re)), im_(std::move(im)) {
  require_size(im_.size(), re_.size(), "ComplexField imaginary part");
}

bool ComplexField::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(re_.begin(), re_.end(), finite) && std::all_of(im_.begin(), im_.end(), finite);
}

double ComplexField::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, (*this)[i].abs());
  return m;
}

ComplexField ComplexField::times_i() const {
  ComplexField out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out.re_[i] = -im_[i];
    out.im_[i] = re_[i];
  }
  return out;
}

ComplexField ComplexField::rotated(double alpha) const {
  const Cplx e = Cplx::polar(1.0, alpha);
  return generate(size(), [&](std::size_t i) { return e * (*this)[i]; });
}

ComplexField ComplexField::scaled(double s) const {
  return generate(size(), [&](std::size_t i) { return s * (*this)[i]; });
}

ComplexField ComplexField::reversed() const {
  const std::size_t n = size();
  return generate(n, [&](std::size_t i) { return (*this)[n - 1 - i]; });
}

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  require_size(b.size(), a.size(), "ComplexField sum");
  return ComplexField::generate(a.size(), [&](std::size_t i) { return a[i] + b[i]; });
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  require_size(b.size(), a.size(), "ComplexField difference");
  return ComplexField::generate(a.size(), [&](std::size_t i) { return a[i] - b[i]; });
}

CylinderGrid::CylinderGrid(std::size_t m, PowerParam p) {
  if (m < 4 || m % 2 != 0) fail(ErrorKind::domain, "CylinderGrid needs an even m >= 4");
  Data d{p, 2.0 / static_cast<double>(m), {}, {}, {}, {}};
  d.y.resize(m);
  for (std::size_t j = 0; j < m / 2; ++j) {
    d.y[j] = -1.0 + (static_cast<double>(j) + 0.5) * d.h;
    d.y[m - 1 - j] = -d.y[j];
  }
  const double a = p.alpha();
  d.rho.resize(m);
  d.diss.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double one_minus = (1.0 - d.y[j]) * (1.0 + d.y[j]);
    d.rho[j] = std::pow(one_minus, a);
    d.diss[j] = std::pow(one_minus, a - 1.0);
  }
  d.flux.resize(m - 1);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double yh = -1.0 + static_cast<double>(j + 1) * d.h;
    d.flux[j] = std::pow((1.0 - yh) * (1.0 + yh), a + 1.0);
  }
  // mirror the half-node coefficients as well
  for (std::size_t j = 0; j < (m - 1) / 2; ++j) d.flux[m - 2 - j] = d.flux[j];
  data_ = std::make_shared<const Data>(std::move(d));
}

namespace {

double mirrored_sum(std::span<const double> f, std::span<const double> w) {
  const std::size_t m = f.size();
  double s = 0.0;
  for (std::size_t j = 0; j < m / 2; ++j) s += f[j] * w[j] + f[m - 1 - j] * w[m - 1 - j];
  return s;
}

}  // namespace

double quad_rho(const CylinderGrid& grid, std::span<const double> f) {
  require_size(f.size(), grid.m(), "quad_rho");
  return mirrored_sum(f, grid.rho()) * grid.h();
}

Cplx quad_rho(const CylinderGrid& grid, const ComplexField& f) {
  return {quad_rho(grid, f.re()), quad_rho(grid, f.im())};
}

double quad_dissipation(const CylinderGrid& grid, std::span<const double> f) {
  require_size(f.size(), grid.m(), "quad_dissipation");
  return mirrored_sum(f, grid.dissipation_weight()) * grid.h();
}

std::vector<double> derivative_y(const CylinderGrid& grid, std::span<const double> f) {
  const std::size_t m = grid.m();
  require_size(f.size(), m, "derivative_y");
  const double inv2h = 1.0 / (2.0 * grid.h());
  std::vector<double> d(m);
  for (std::size_t j = 1; j + 1 < m; ++j) d[j] = (f[j + 1] - f[j - 1]) * inv2h;
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
  d[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) * inv2h;
  return d;
}

ComplexField derivative_y(const CylinderGrid& grid, const ComplexField& f) {
  return ComplexField(derivative_y(grid, f.re()), derivative_y(grid, f.im()));
}

Cplx inner_rho(const CylinderGrid& grid, const ComplexField& a, const ComplexField& b) {
  require_size(a.size(), grid.m(), "inner_rho");
  require_size(b.size(), grid.m(), "inner_rho");
  std::vector<double> re(grid.m()), im(grid.m());
  for (std::size_t j = 0; j < grid.m(); ++j) {
    const Cplx z = a[j] * b[j].conj();
    re[j] = z.re;
    im[j] = z.im;
  }
  return {quad_rho(grid, re), quad_rho(grid, im)};
}

double norm_L2rho(const CylinderGrid& grid, const ComplexField& f) {
  require_size(f.size(), grid.m(), "norm_L2rho");
  std::vector<double> g(grid.m());
  for (std::size_t j = 0; j < grid.m(); ++j) g[j] = f[j].abs2();
  return std::sqrt(quad_rho(grid, g));
}

double norm_H(const CylinderGrid& grid, const ComplexField& q1, const ComplexField& q2) {
  const std::size_t m = grid.m();
  require_size(q1.size(), m, "norm_H first component");
  require_size(q2.size(), m, "norm_H second component");
  require_finite(q1, "norm_H first component");
  require_finite(q2, "norm_H second component");
  const ComplexField dq = derivative_y(grid, q1);
  const auto y = grid.y();
  std::vector<double> g(m);
  for (std::size_t j = 0; j < m; ++j) {
    g[j] = q1[j].abs2() + dq[j].abs2() * (1.0 - y[j]) * (1.0 + y[j]) + q2[j].abs2();
  }
  return std::sqrt(quad_rho(grid, g));
}

double norm_H0(const CylinderGrid& grid, const ComplexField& r) {
  return norm_H(grid, r, ComplexField(grid.m()));
}

double norm_H1L2(const CylinderGrid& grid, const ComplexField& q1, const ComplexField& q2) {
  const std::size_t m = grid.m();
  require_size(q1.size(), m, "norm_H1L2 first component");
  require_size(q2.size(), m, "norm_H1L2 second component");
  const ComplexField dq = derivative_y(grid, q1);
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += q1[j].abs2() + dq[j].abs2() + q2[j].abs2();
  return std::sqrt(s * grid.h());
}

}  // namespace blowup
