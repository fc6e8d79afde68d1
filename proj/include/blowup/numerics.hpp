#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "blowup/error.hpp"

namespace blowup {

/// Complex scalar as a plain pair of reals.
struct Cplx {
  double re = 0.0;
  double im = 0.0;

  static Cplx polar(double r, double theta) {
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  double abs2() const { return re * re + im * im; }
  double abs() const { return std::hypot(re, im); }
  double arg() const { return std::atan2(im, re); }
  Cplx conj() const { return {re, -im}; }

  friend Cplx operator+(Cplx a, Cplx b) { return {a.re + b.re, a.im + b.im}; }
  friend Cplx operator-(Cplx a, Cplx b) { return {a.re - b.re, a.im - b.im}; }
  friend Cplx operator*(Cplx a, Cplx b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cplx operator*(double s, Cplx a) { return {s * a.re, s * a.im}; }
  friend Cplx operator*(Cplx a, double s) { return {s * a.re, s * a.im}; }
  friend bool operator==(Cplx a, Cplx b) = default;
};

/// Nonlinearity exponent p > 1 with the constants of the cylinder equation.
class PowerParam {
 public:
  explicit PowerParam(double p);

  double p() const { return p_; }
  /// 2/(p-1): the self-similar scaling exponent.
  double alpha() const { return alpha_; }
  /// 2(p+1)/(p-1)^2: the mass coefficient of the w-equation.
  double mass() const { return mass_; }
  /// (p+3)/(p-1): the damping coefficient of the w-equation.
  double damping() const { return damping_; }

 private:
  double p_;
  double alpha_;
  double mass_;
  double damping_;
};

/// Uniform periodic grid: n nodes x_i = xmin + i*dx, dx = (xmax-xmin)/n.
class Grid1D {
 public:
  Grid1D(double xmin, double xmax, std::size_t n);

  double xmin() const { return xmin_; }
  double xmax() const { return xmax_; }
  std::size_t n() const { return n_; }
  double dx() const { return dx_; }
  double length() const { return xmax_ - xmin_; }
  double x(std::size_t i) const { return xmin_ + static_cast<double>(i) * dx_; }
  /// Index of the node nearest to x (clamped to the grid).
  std::size_t nearest(double x) const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double xmin_;
  double xmax_;
  std::size_t n_;
  double dx_;
};

/// Complex samples stored as separate real and imaginary arrays.
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(std::size_t n) : re_(n, 0.0), im_(n, 0.0) {}
  ComplexField(std::vector<double> re, std::vector<double> im);

  template <class F>
  static ComplexField generate(std::size_t n, F&& f) {
    ComplexField out(n);
    for (std::size_t i = 0; i < n; ++i) out.set(i, f(i));
    return out;
  }

  std::size_t size() const { return re_.size(); }
  Cplx operator[](std::size_t i) const { return {re_[i], im_[i]}; }
  void set(std::size_t i, Cplx z) {
    re_[i] = z.re;
    im_[i] = z.im;
  }

  std::span<const double> re() const { return re_; }
  std::span<const double> im() const { return im_; }
  std::span<double> re() { return re_; }
  std::span<double> im() { return im_; }

  bool all_finite() const;
  double max_abs() const;
  /// Multiply every sample by e^{i alpha}.
  ComplexField rotated(double alpha) const;
  /// Multiply every sample by i, exactly: (re, im) -> (-im, re).
  ComplexField times_i() const;
  /// Multiply every sample by a real scalar.
  ComplexField scaled(double s) const;
  /// Samples in reverse order (y -> -y on a symmetric grid).
  ComplexField reversed() const;

  friend ComplexField operator+(const ComplexField& a, const ComplexField& b);
  friend ComplexField operator-(const ComplexField& a, const ComplexField& b);
  friend bool operator==(const ComplexField&, const ComplexField&) = default;

 private:
  std::vector<double> re_;
  std::vector<double> im_;
};

/// Half-offset interior nodes of (-1, 1) with the weight rho(y) = (1-y^2)^{2/(p-1)}.
///
/// Nodes y_j = -1 + (j + 1/2) h, h = 2/m, are mirrored exactly (y_{m-1-j} = -y_j)
/// so symmetric sums cancel odd integrands to the last bit. The flux
/// coefficient rho(1-y^2) is stored at the m-1 interior half nodes; it vanishes
/// at y = +-1, which is where the degenerate operator needs no boundary value.
/// Copies share the node data.
class CylinderGrid {
 public:
  CylinderGrid(std::size_t m, PowerParam p);

  std::size_t m() const { return data_->y.size(); }
  double h() const { return data_->h; }
  const PowerParam& power() const { return data_->p; }

  std::span<const double> y() const { return data_->y; }
  std::span<const double> rho() const { return data_->rho; }
  /// rho(y)(1-y^2) at half nodes y_{j+1/2}, j = 0..m-2.
  std::span<const double> flux_coeff() const { return data_->flux; }
  /// rho(y)/(1-y^2) at nodes: the dissipation weight.
  std::span<const double> dissipation_weight() const { return data_->diss; }

  bool same_as(const CylinderGrid& other) const {
    return data_ == other.data_ || (m() == other.m() && power().p() == other.power().p());
  }

 private:
  struct Data {
    PowerParam p;
    double h;
    std::vector<double> y, rho, flux, diss;
  };
  std::shared_ptr<const Data> data_;
};

/// Midpoint quadrature sum_j f(y_j) rho(y_j) h, summed in mirrored pairs.
double quad_rho(const CylinderGrid& grid, std::span<const double> f);
Cplx quad_rho(const CylinderGrid& grid, const ComplexField& f);

/// Same quadrature with the dissipation weight rho/(1-y^2).
double quad_dissipation(const CylinderGrid& grid, std::span<const double> f);

/// d/dy on the cylinder: centered in the interior, one-sided second order at
/// the two extreme nodes.
std::vector<double> derivative_y(const CylinderGrid& grid, std::span<const double> f);
ComplexField derivative_y(const CylinderGrid& grid, const ComplexField& f);

/// L^2_rho inner product <a, b> = int a conj(b) rho dy.
Cplx inner_rho(const CylinderGrid& grid, const ComplexField& a, const ComplexField& b);
double norm_L2rho(const CylinderGrid& grid, const ComplexField& f);

/// Energy-space norm: (int |q1|^2 + |q1'|^2 (1-y^2) + |q2|^2) rho dy)^{1/2}.
double norm_H(const CylinderGrid& grid, const ComplexField& q1, const ComplexField& q2);
/// First component of the energy space: norm_H with q2 = 0.
double norm_H0(const CylinderGrid& grid, const ComplexField& r);
/// The lighter H^1 x L^2 norm on (-1,1) without weights.
double norm_H1L2(const CylinderGrid& grid, const ComplexField& q1, const ComplexField& q2);

void require_size(std::size_t got, std::size_t want, const char* what);
void require_finite(const ComplexField& f, const char* what);

}  // namespace blowup
