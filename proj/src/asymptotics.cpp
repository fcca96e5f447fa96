#include "whop/asymptotics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace whop {

namespace {
constexpr double kPi = std::numbers::pi;
const double kFourPiSq = 4.0 * kPi * kPi;
}  // namespace

Complex coeff_A_closed(const TestFunction& g, Complex s) {
  if (!g.is_polynomial())
    throw std::invalid_argument("coeff_A_closed: polynomial test functions only");
  Complex sum = 0.0;
  double harmonic = 0.0;  // H_{p-1}, starting at H_0 = 0
  Complex sp = 1.0;
  const auto& c = g.coeffs();
  for (size_t k = 0; k < c.size(); ++k) {
    const int p = static_cast<int>(k) + 1;
    sp *= s;  // s^p
    if (p >= 2) harmonic += 1.0 / (p - 1);
    sum += c[k] * (-sp * harmonic);
  }
  return sum / kFourPiSq;
}

Complex coeff_A_quadrature(const TestFunction& g, Complex s, int level) {
  const bool real_only = !g.is_polynomial();
  if (real_only && s.imag() != 0.0)
    throw std::invalid_argument("coeff_A_quadrature: smooth g requires real s");
  auto geval = [&](Complex t) { return g.eval(t); };

  const double t_edge = 1e-9;
  auto integrand = [&](double t) -> Complex {
    if (t < t_edge) {
      const double dg0 = g.derivative(0.0);
      if (!std::isfinite(dg0))
        throw std::invalid_argument("coeff_A_quadrature: g lacks a derivative at t = 0");
      return s * dg0 - geval(s);
    }
    if (1.0 - t < t_edge) {
      if (real_only) {
        const double dgs = g.derivative(s.real());
        if (!std::isfinite(dgs))
          throw std::invalid_argument("coeff_A_quadrature: g lacks a derivative at t = 1");
        return geval(s) - s * dgs;
      }
      // polynomial derivative at complex s via coefficients
      Complex v = 0.0;
      const auto& c = g.coeffs();
      for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
        v = v * s + (k + 1.0) * c[k];
      return geval(s) - s * v;
    }
    return (geval(s * t) - t * geval(s)) / (t * (1.0 - t));
  };

  std::vector<double> nodes, weights;
  composite_gauss(0.0, 1.0, std::max(1, level), 16, nodes, weights);
  Complex acc = 0.0;
  for (size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * integrand(nodes[i]);
  return acc / kFourPiSq;
}

Complex coeff_A(const TestFunction& g, Complex s) {
  if (g.is_polynomial()) return coeff_A_closed(g, s);
  return coeff_A_quadrature(g, s, 8);
}

namespace {

// Volume rule of a domain, complement handled as bbox minus inner via signed
// weights (internal to W0 only; exposed rules keep positive weights).
void signed_volume_rule(const Domain& dom, int level, QuadRule& rule,
                        std::vector<double>& signs) {
  if (!dom.is_complement()) {
    rule = volume_quadrature(dom, level);
    signs.assign(rule.weights.size(), 1.0);
    return;
  }
  const Domain bbox = dom.dim() == 1
                          ? Domain::interval(dom.lo().x(), dom.hi().x())
                          : Domain::box(dom.lo(), dom.hi());
  rule = volume_quadrature(bbox, level);
  signs.assign(rule.weights.size(), 1.0);
  const QuadRule inner = volume_quadrature(dom.inner(), level);
  for (size_t i = 0; i < inner.nodes.size(); ++i) {
    rule.nodes.push_back(inner.nodes[i]);
    rule.weights.push_back(inner.weights[i]);
    signs.push_back(-1.0);
  }
}

}  // namespace

Complex coeff_W0(const PhaseSpaceFn& b, const Domain& lambda, const Domain& omega,
                 int level) {
  if (lambda.dim() != omega.dim())
    throw std::invalid_argument("coeff_W0: dimension mismatch");
  const int d = lambda.dim();
  QuadRule rx, rxi;
  std::vector<double> sx, sxi;
  signed_volume_rule(lambda, level, rx, sx);
  signed_volume_rule(omega, level, rxi, sxi);
  Complex acc = 0.0;
  for (size_t i = 0; i < rx.nodes.size(); ++i) {
    Complex inner = 0.0;
    for (size_t j = 0; j < rxi.nodes.size(); ++j)
      inner += sxi[j] * rxi.weights[j] * b(rx.nodes[i], rxi.nodes[j]);
    acc += sx[i] * rx.weights[i] * inner;
  }
  return acc / std::pow(2.0 * kPi, d);
}

Complex coeff_W1(const PhaseSpaceFn& b, const std::vector<BoundaryPatch>& boundary_l,
                 const std::vector<BoundaryPatch>& boundary_p, int level, int dim) {
  std::vector<QuadRule> rules_l, rules_p;
  for (const auto& p : boundary_l) rules_l.push_back(surface_quadrature(p, level));
  for (const auto& p : boundary_p) rules_p.push_back(surface_quadrature(p, level));
  Complex acc = 0.0;
  for (const auto& rl : rules_l) {
    for (size_t i = 0; i < rl.nodes.size(); ++i) {
      const Point& x = rl.nodes[i];
      const Point& nx = rl.normals[i];
      Complex inner = 0.0;
      for (const auto& rp : rules_p) {
        for (size_t j = 0; j < rp.nodes.size(); ++j) {
          const double ndot = std::abs(nx.dot(rp.normals[j]));
          if (ndot == 0.0) continue;
          inner += rp.weights[j] * ndot * b(x, rp.nodes[j]);
        }
      }
      acc += rl.weights[i] * inner;
    }
  }
  return acc / std::pow(2.0 * kPi, dim - 1);
}

Prediction predict(const TestFunction& g, const Symbol& a, const Domain& lambda,
                   const Domain& omega, bool symmetrized, int level_volume,
                   int level_surface) {
  const int d = lambda.dim();
  Prediction out;
  out.level_volume = level_volume;
  out.level_surface = level_surface;
  out.symmetrized = symmetrized;

  auto a_at = [&](const Point& x, const Point& xi) -> Complex {
    Complex v = a.eval(x, xi, d);
    return symmetrized ? Complex(v.real(), 0.0) : v;
  };

  out.w0 = coeff_W0([&](const Point& x, const Point& xi) { return g.eval(a_at(x, xi)); },
                    lambda, omega, level_volume);

  const auto bl = lambda.boundary_patches();
  const auto bp = omega.boundary_patches();
  if (a.is_constant()) {
    Complex aval = a.constant_value();
    if (symmetrized) aval = Complex(aval.real(), 0.0);
    const Complex a_coeff = coeff_A(g, aval);
    out.w1 = a_coeff * coeff_W1([](const Point&, const Point&) { return Complex(1.0); },
                                bl, bp, level_surface, d);
  } else {
    out.w1 = coeff_W1(
        [&](const Point& x, const Point& xi) { return coeff_A(g, a_at(x, xi)); }, bl, bp,
        level_surface, d);
  }
  return out;
}

FitResult fit_log_coefficient(const std::vector<std::pair<double, double>>& alpha_trace,
                              std::optional<double> w0_known, int d, double window_lo,
                              double window_hi) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [alpha, y] : alpha_trace)
    if (alpha >= window_lo && alpha <= window_hi) pts.emplace_back(alpha, y);
  std::sort(pts.begin(), pts.end());
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i].first == pts[i + 1].first)
      throw std::invalid_argument("fit_log_coefficient: duplicate alpha values");
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw std::invalid_argument("fit_log_coefficient: need >= 3 records in window");

  const int cols = w0_known ? 2 : 3;
  Eigen::MatrixXd A(n, cols);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double a = pts[i].first;
    const double boundary_scale = std::pow(a, d - 1);
    A(i, 0) = boundary_scale * std::log(a);
    A(i, 1) = boundary_scale;
    if (!w0_known) A(i, 2) = std::pow(a, d);
    y(i) = pts[i].second - (w0_known ? *w0_known * std::pow(a, d) : 0.0);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()(cols - 1);
  const double smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e14)
    throw std::runtime_error("fit_log_coefficient: singular design matrix (alphas too clustered)");
  const Eigen::VectorXd sol = svd.solve(y);

  FitResult fit;
  fit.c_log = sol(0);
  fit.c_plain = sol(1);
  if (!w0_known) fit.w0_fitted = sol(2);
  fit.residual_norm = (A * sol - y).norm();
  fit.condition = smax / smin;
  fit.window_lo = pts.front().first;
  fit.window_hi = pts.back().first;
  fit.n_used = n;
  return fit;
}

}  // namespace whop
