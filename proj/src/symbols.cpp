#include "whop/symbols.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace whop {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kBias = 1.10;  // sampling sup-norms are inflated by 10%
}  // namespace

// ---------------------------------------------------------------------------
// Factor1D
// ---------------------------------------------------------------------------

Factor1D Factor1D::constant(double c) {
  Factor1D f;
  f.kind_ = Kind::Constant;
  f.c_ = c;
  return f;
}

Factor1D Factor1D::gaussian_bump(double center, double width) {
  if (!(width > 0)) throw std::invalid_argument("gaussian_bump: width must be > 0");
  Factor1D f;
  f.kind_ = Kind::Gaussian;
  f.center_ = center;
  f.width_ = width;
  return f;
}

Factor1D Factor1D::cosine_window(double center, double width) {
  if (!(width > 0)) throw std::invalid_argument("cosine_window: width must be > 0");
  Factor1D f;
  f.kind_ = Kind::CosWindow;
  f.center_ = center;
  f.width_ = width;
  return f;
}

Factor1D Factor1D::poly_bump(std::vector<double> poly_coeffs, double center, double width) {
  if (!(width > 0)) throw std::invalid_argument("poly_bump: width must be > 0");
  Factor1D f;
  f.kind_ = Kind::PolyBump;
  f.center_ = center;
  f.width_ = width;
  f.poly_ = std::move(poly_coeffs);
  return f;
}

namespace {

// Probabilists' Hermite polynomial He_n(u).
double hermite(int n, double u) {
  double h0 = 1.0, h1 = u;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = u * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double poly_eval(const std::vector<double>& c, double x, int deriv) {
  // c[k] multiplies x^k.
  double v = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= deriv; --k) {
    double f = 1.0;
    for (int j = 0; j < deriv; ++j) f *= (k - j);
    v = v * x + f * c[k];
  }
  return v;
}

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double Factor1D::eval(double x, int deriv) const {
  if (deriv < 0 || deriv > kMaxDeriv)
    throw std::invalid_argument("Factor1D: derivative order beyond catalogue table");
  switch (kind_) {
    case Kind::Constant:
      return deriv == 0 ? c_ : 0.0;
    case Kind::Gaussian: {
      const double u = (x - center_) / width_;
      const double g = std::exp(-0.5 * u * u);
      if (deriv == 0) return g;
      const double sign = (deriv % 2 == 0) ? 1.0 : -1.0;
      return sign * hermite(deriv, u) * g / std::pow(width_, deriv);
    }
    case Kind::CosWindow: {
      const double u = (x - center_) / width_;
      if (std::abs(u) >= 1.0) return 0.0;
      // cos^6 v = (10 + 15 cos 2v + 6 cos 4v + cos 6v) / 32, v = pi u / 2.
      const double v = 0.5 * kPi * u;
      static const double amp[4] = {10.0, 15.0, 6.0, 1.0};
      double s = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double omega = k * kPi / width_;  // d/dx of (2k v)
        if (deriv > 0 && k == 0) continue;
        s += amp[k] * std::pow(omega, deriv) * std::cos(2.0 * k * v + 0.5 * kPi * deriv);
      }
      return s / 32.0;
    }
    case Kind::PolyBump: {
      const auto g = Factor1D::gaussian_bump(center_, width_);
      double s = 0.0;
      for (int j = 0; j <= deriv; ++j)
        s += binom(deriv, j) * poly_eval(poly_, x, j) * g.eval(x, deriv - j);
      return s;
    }
  }
  return 0.0;
}

double Factor1D::support_radius() const {
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::Gaussian:
    case Kind::PolyBump:
      return 9.0 * width_;  // exp(-40.5) below double noise for plain bumps
    case Kind::CosWindow:
      return width_;
  }
  return 0.0;
}

double Factor1D::support_center() const {
  return kind_ == Kind::Constant ? 0.0 : center_;
}

double Factor1D::sup_deriv(int n) const {
  if (n < 0 || n > kMaxDeriv)
    throw std::invalid_argument("Factor1D: derivative order beyond catalogue table");
  if (kind_ == Kind::Constant) return n == 0 ? std::abs(c_) : 0.0;
  const double r = support_radius();
  const int samples = 4001;
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = center_ - r + 2.0 * r * i / (samples - 1);
    m = std::max(m, std::abs(eval(x, n)));
  }
  return kBias * m;
}

// ---------------------------------------------------------------------------
// FactorND
// ---------------------------------------------------------------------------

FactorND::FactorND(Factor1D fx, int dim) {
  axes_.push_back(fx);
  if (dim == 2) axes_.push_back(fx);
}

FactorND::FactorND(Factor1D fx, Factor1D fy) {
  axes_.push_back(std::move(fx));
  axes_.push_back(std::move(fy));
}

double FactorND::eval(const Point& x, int dim) const {
  if (axes_.empty()) return 1.0;
  double v = axes_[0].eval(x.x());
  if (dim == 2) v *= axes_[std::min<size_t>(1, axes_.size() - 1)].eval(x.y());
  return v;
}

double FactorND::sup_deriv(int n, int dim) const {
  if (axes_.empty()) return n == 0 ? 1.0 : 0.0;
  if (dim == 1) return axes_[0].sup_deriv(n);
  const Factor1D& fy = axes_[std::min<size_t>(1, axes_.size() - 1)];
  double m = 0.0;
  for (int k = 0; k <= n; ++k) m = std::max(m, axes_[0].sup_deriv(k) * fy.sup_deriv(n - k));
  return m;
}

double FactorND::support_radius() const {
  double r = 0.0;
  for (const auto& a : axes_) {
    if (a.is_constant()) continue;
    r = std::max(r, std::abs(a.support_center()) + a.support_radius());
  }
  return r;
}

bool FactorND::is_constant() const {
  for (const auto& a : axes_)
    if (!a.is_constant()) return false;
  return true;
}

double FactorND::constant_value() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.eval(0.0);
  return v;
}

// ---------------------------------------------------------------------------
// Symbol
// ---------------------------------------------------------------------------

Symbol Symbol::constant(Complex c) {
  Symbol s;
  s.is_constant_ = true;
  s.scale_ = c;
  s.is_real_ = (c.imag() == 0.0);
  return s;
}

Symbol Symbol::separable(FactorND spatial, FactorND frequency, Complex scale) {
  Symbol s;
  s.is_constant_ = spatial.is_constant() && frequency.is_constant();
  if (s.is_constant_) {
    s.scale_ = scale * spatial.constant_value() * frequency.constant_value();
  } else {
    s.scale_ = scale;
    s.spatial_ = std::move(spatial);
    s.frequency_ = std::move(frequency);
  }
  s.is_real_ = (s.scale_.imag() == 0.0);
  return s;
}

Complex Symbol::eval(const Point& x, const Point& xi, int dim) const {
  if (is_constant_) return scale_;
  return scale_ * spatial_.eval(x, dim) * frequency_.eval(xi, dim);
}

double Symbol::spatial_support_radius() const {
  return is_constant_ ? 0.0 : spatial_.support_radius();
}

double norm_estimate(const Symbol& s, int n, int m, double ell, double rho, int dim) {
  if (n < 0 || m < 0 || n > Factor1D::kMaxDeriv || m > Factor1D::kMaxDeriv)
    throw std::invalid_argument("norm_estimate: derivative order beyond catalogue table");
  if (!(ell > 0 && rho > 0))
    throw std::invalid_argument("norm_estimate: ell and rho must be positive");
  if (s.is_constant()) return std::abs(s.constant_value());
  const double amp = std::abs(s.scale());
  double best = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double su = s.spatial().sup_deriv(k, dim);
    for (int r = 0; r <= m; ++r) {
      const double sv = s.frequency().sup_deriv(r, dim);
      best = std::max(best, std::pow(ell, k) * std::pow(rho, r) * amp * su * sv);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

TestFunction TestFunction::polynomial(std::vector<double> coeffs) {
  TestFunction g;
  g.poly_ = true;
  g.coeffs_ = std::move(coeffs);
  g.name_ = "poly";
  return g;
}

TestFunction TestFunction::monomial(int p) {
  if (p < 1) throw std::invalid_argument("monomial: requires p >= 1");
  std::vector<double> c(p, 0.0);
  c[p - 1] = 1.0;
  auto g = polynomial(std::move(c));
  g.name_ = "t^" + std::to_string(p);
  return g;
}

TestFunction TestFunction::smooth(std::function<double(double)> g,
                                  std::function<double(double)> dg, std::string name) {
  if (std::abs(g(0.0)) > 1e-14)
    throw std::invalid_argument("TestFunction::smooth: g(0) must vanish");
  TestFunction f;
  f.poly_ = false;
  f.g_ = std::move(g);
  f.dg_ = std::move(dg);
  f.name_ = std::move(name);
  return f;
}

TestFunction TestFunction::named(const std::string& name) {
  if (name == "t_minus_t2")
    return smooth([](double t) { return t - t * t; }, [](double t) { return 1.0 - 2.0 * t; },
                  name);
  if (name == "xlogx_entropy")
    return smooth([](double t) { return t > 0.0 ? -t * std::log(t) : 0.0; },
                  [](double t) {
                    return t > 0.0 ? -(std::log(t) + 1.0)
                                   : std::numeric_limits<double>::quiet_NaN();
                  },
                  name);
  throw std::invalid_argument("TestFunction::named: unknown name '" + name + "'");
}

Complex TestFunction::eval(Complex t) const {
  if (!poly_) {
    if (t.imag() != 0.0)
      throw std::invalid_argument("TestFunction: smooth kind accepts real arguments only");
    return eval(t.real());
  }
  Complex v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * t + *it;
  return v * t;  // zero constant term: g(0) = 0 exactly
}

double TestFunction::eval(double t) const {
  if (!poly_) return g_(t);
  double v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * t + *it;
  return v * t;
}

double TestFunction::derivative(double t) const {
  if (!poly_) {
    if (!dg_) throw std::invalid_argument("TestFunction: missing derivative callable");
    return dg_(t);
  }
  double v = 0.0;
  for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k)
    v = v * t + (k + 1) * coeffs_[k];
  return v;
}

}  // namespace whop
