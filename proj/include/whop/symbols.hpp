#pragma once

#include "whop/geometry.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace whop {

using Complex = std::complex<double>;

/// One-dimensional smooth factor from a closed catalogue, with closed-form
/// derivatives up to order 5.
class Factor1D {
 public:
  static Factor1D constant(double c = 1.0);
  /// exp(-(x-c)^2 / (2 w^2))
  static Factor1D gaussian_bump(double center, double width);
  /// cos^6(pi (x-c) / (2 w)) on |x-c| < w, zero outside; compactly supported,
  /// C^5 across the support edge.
  static Factor1D cosine_window(double center, double width);
  /// P(x) * gaussian_bump(center, width), P given by ascending coefficients.
  static Factor1D poly_bump(std::vector<double> poly_coeffs, double center, double width);

  double eval(double x, int deriv = 0) const;
  /// Upper-biased sup of |d^n/dx^n| over the line (dense sampling + 10%).
  double sup_deriv(int n) const;
  /// Radius of an interval outside which the factor is (numerically) zero;
  /// 0 means unbounded support (constants).
  double support_radius() const;
  double support_center() const;
  bool is_constant() const { return kind_ == Kind::Constant; }
  bool compactly_supported() const { return kind_ == Kind::CosWindow; }

  static constexpr int kMaxDeriv = 5;

 private:
  enum class Kind { Constant, Gaussian, CosWindow, PolyBump };
  Kind kind_ = Kind::Constant;
  double c_ = 1.0;       // constant value
  double center_ = 0.0;
  double width_ = 1.0;
  std::vector<double> poly_;
};

/// Product of per-axis factors, a smooth function on R^d.
class FactorND {
 public:
  FactorND() = default;
  FactorND(Factor1D fx, int dim);                  // same factor on every axis
  FactorND(Factor1D fx, Factor1D fy);              // d = 2
  double eval(const Point& x, int dim) const;
  /// Upper-biased sup over multi-indices of total order n of |D^beta f|.
  double sup_deriv(int n, int dim) const;
  double support_radius() const;
  bool is_constant() const;
  double constant_value() const;

 private:
  std::vector<Factor1D> axes_;
};

/// Phase-space symbol a(x, xi): a complex constant, a separable product
/// u(x) v(xi), or a constant times such a product.
class Symbol {
 public:
  static Symbol constant(Complex c);
  static Symbol separable(FactorND spatial, FactorND frequency, Complex scale = 1.0);

  Complex eval(const Point& x, const Point& xi, int dim) const;

  bool is_constant() const { return is_constant_; }
  bool is_separable() const { return !is_constant_; }
  bool is_real() const { return is_real_; }
  Complex constant_value() const { return scale_; }
  const FactorND& spatial() const { return spatial_; }
  const FactorND& frequency() const { return frequency_; }
  Complex scale() const { return scale_; }
  double spatial_support_radius() const;

 private:
  bool is_constant_ = true;
  bool is_real_ = true;
  Complex scale_ = 1.0;
  FactorND spatial_, frequency_;
};

/// Scaled derivative sup-norm max_{k<=n, r<=m} ell^k rho^r sup |D_x^k D_xi^r a|,
/// from closed-form factor derivatives; upper-biased by 10%.
double norm_estimate(const Symbol& s, int n, int m, double ell, double rho, int dim);

/// Test function g with g(0) = 0: either a polynomial with zero constant term
/// (valid on all of C) or a smooth callable on R with a derivative callable.
class TestFunction {
 public:
  /// coeffs[k] multiplies t^{k+1}.
  static TestFunction polynomial(std::vector<double> coeffs);
  static TestFunction monomial(int p);
  static TestFunction smooth(std::function<double(double)> g,
                             std::function<double(double)> dg, std::string name = "smooth");
  /// Named presets: "t_minus_t2" (t - t^2), "xlogx_entropy" (-t log t).
  static TestFunction named(const std::string& name);

  Complex eval(Complex t) const;
  double eval(double t) const;
  double derivative(double t) const;

  bool is_polynomial() const { return poly_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::string& name() const { return name_; }

 private:
  bool poly_ = true;
  std::vector<double> coeffs_;
  std::function<double(double)> g_, dg_;
  std::string name_;
};

}  // namespace whop
