#pragma once

#include "whop/operators.hpp"

#include <optional>
#include <vector>

namespace whop {

/// Eigenvalue and trace data of one discrete operator.
struct SpectralSummary {
  std::optional<std::vector<double>> eigenvalues;  // Hermitian path only
  std::vector<Complex> traces_of_powers;           // tr T^p, p = 1..p_max
  std::optional<double> trace_norm;
  double alpha = 0.0;
  Backend backend = Backend::TorusFFT;
  long n_dof = 0;
};

/// tr T^p for p = 1..p_max by iterated matrix products with running diagonal
/// extraction; valid for non-Hermitian matrices.
std::vector<Complex> trace_poly(const DiscreteOperator& op, int p_max);

struct ClampReport {
  double max_clamp = 0.0;  // largest eigenvalue move applied
  int n_clamped = 0;
};

/// tr g(T) through the full symmetric eigendecomposition. Requires a
/// Hermitian operator. When `clamp_unit` is set, eigenvalues are clamped to
/// [0,1] before applying g and the clamp magnitude is reported.
double trace_smooth(const DiscreteOperator& op, const TestFunction& g, bool clamp_unit,
                    ClampReport* report = nullptr);
/// Clamp policy by provenance: on for a == 1 operators.
double trace_smooth(const DiscreteOperator& op, const TestFunction& g);

/// Trace-class (S_1) norm: sum of singular values via full SVD.
double trace_norm(const DiscreteOperator& op);
double trace_norm_matrix(const Eigen::MatrixXcd& m);

SpectralSummary summarize(const DiscreteOperator& op, int p_max, bool with_eigenvalues,
                          bool with_trace_norm);

/// Trace norms of [Op_alpha(b), chi_Lambda] and [Op_alpha(b), P_{Omega,alpha}]
/// on the torus lattice, per alpha, with the ratios to alpha^{d-1}.
struct CommutatorRow {
  double alpha = 0.0;
  double norm_chi = 0.0;   // ||[Op(b), chi_Lambda]||_S1
  double norm_proj = 0.0;  // ||[Op(b), P_Omega]||_S1
  double ratio_chi = 0.0;
  double ratio_proj = 0.0;
  double alpha_ell_rho = 0.0;  // validity product reported alongside
  long n_dof = 0;
};

std::vector<CommutatorRow> commutator_growth(const Symbol& b, const Domain& lambda,
                                             const Domain& omega,
                                             const std::vector<double>& alphas,
                                             const Resolution& res);

/// tr[ g_p(T_alpha(a; Lambda, Omega)) - chi_Lambda g_p(T_alpha(a; R^d, Omega)) chi_Lambda ]
/// on one torus grid. Lambda may be a complement domain (bounded complement
/// inside the grid box). Exactly zero for p = 1.
Complex regularized_trace_diff(const Symbol& a, const Domain& lambda, const Domain& omega,
                               double alpha, int p, const TorusGrid& grid);

}  // namespace whop
