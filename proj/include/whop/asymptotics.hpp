#pragma once

#include "whop/geometry.hpp"
#include "whop/symbols.hpp"

#include <optional>
#include <string>
#include <vector>

namespace whop {

/// A(g; s) = (2 pi)^{-2} \int_0^1 (g(st) - t g(s)) / (t (1-t)) dt.
/// Polynomial g dispatches to the harmonic-number closed form; otherwise the
/// quadrature path is used.
Complex coeff_A(const TestFunction& g, Complex s);

/// Closed form for polynomial g: sum_p c_p (-s^p H_{p-1}) / (4 pi^2).
Complex coeff_A_closed(const TestFunction& g, Complex s);

/// Independent quadrature route: composite Gauss-Legendre on [0,1] with the
/// removable endpoint limits substituted near t = 0 and t = 1.
Complex coeff_A_quadrature(const TestFunction& g, Complex s, int level = 8);

using PhaseSpaceFn = std::function<Complex(const Point&, const Point&)>;

/// W0(b) = (2 pi)^{-d} \int_Lambda \int_Omega b(x, xi) dxi dx by tensored
/// volume rules. Complement domains integrate as bbox minus inner.
Complex coeff_W0(const PhaseSpaceFn& b, const Domain& lambda, const Domain& omega,
                 int level);

/// W1(b; L, P) = (2 pi)^{-(d-1)} \int_L \int_P b(x, xi) |n_L(x) . n_P(xi)|.
/// In d=1 the patches are boundary points and the rule degenerates to the
/// finite sum over endpoint pairs.
Complex coeff_W1(const PhaseSpaceFn& b, const std::vector<BoundaryPatch>& boundary_l,
                 const std::vector<BoundaryPatch>& boundary_p, int level, int dim);

/// Two-term prediction of the trace asymptotics
///   tr g(T_alpha) ~ alpha^d W0(g(a)) + alpha^{d-1} log(alpha) W1(A(g; a)).
struct Prediction {
  Complex w0 = 0.0;  // coefficient of alpha^d
  Complex w1 = 0.0;  // coefficient of alpha^{d-1} log alpha
  int level_volume = 0;
  int level_surface = 0;
  bool symmetrized = false;
};

Prediction predict(const TestFunction& g, const Symbol& a, const Domain& lambda,
                   const Domain& omega, bool symmetrized, int level_volume,
                   int level_surface);

/// Least-squares extraction of the alpha^{d-1} log(alpha) coefficient from a
/// trace sweep. With w0 known the model is
///   y - w0 a^d = c_log a^{d-1} log a + c_plain a^{d-1},
/// otherwise w0 joins the fit.
struct FitResult {
  double c_log = 0.0;
  double c_plain = 0.0;
  std::optional<double> w0_fitted;
  double residual_norm = 0.0;
  double condition = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  int n_used = 0;
};

FitResult fit_log_coefficient(const std::vector<std::pair<double, double>>& alpha_trace,
                              std::optional<double> w0_known, int d,
                              double window_lo = 0.0,
                              double window_hi = std::numeric_limits<double>::infinity());

}  // namespace whop
