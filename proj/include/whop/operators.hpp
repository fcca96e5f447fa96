#pragma once

#include "whop/geometry.hpp"
#include "whop/symbols.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace whop {

enum class Backend { AnalyticDense, TorusFFT };

/// Resolution policy shared by both backends.
struct Resolution {
  double ppw = 6.0;         // lattice points per oscillation wavelength 2pi/(alpha R)
  double pad_factor = 3.0;  // torus box padding over the domain extent
  int n_override = 0;       // explicit points per side (0 = derive from ppw)
  double budget_mb = 4096.0;
};

/// Thrown when a resolution/memory guard refuses an assembly; the message
/// names the violated guard and the required value.
struct GuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Periodic lattice underlying the FFT backend. Per axis: N points with
/// spacing h over a box of side L = N h starting at x0; frequency lattice
/// xi_k = 2 pi k / (alpha L) for k in the centered integer range (N odd).
struct TorusGrid {
  int dim = 1;
  double alpha = 0.0;
  std::array<int, 2> n{1, 1};
  std::array<double, 2> h{0.0, 0.0};
  std::array<double, 2> box_len{0.0, 0.0};
  std::array<double, 2> x0{0.0, 0.0};
  double freq_count_rel_error = 0.0;  // lattice count vs |Omega| density
  double budget_mb = 4096.0;          // compressed-matrix memory guard

  long total_points() const { return dim == 1 ? n[0] : long(n[0]) * n[1]; }
  Point node(long linear) const;
  Point frequency(long linear) const;  // signed DFT index convention
  long wrap_diff(long ia, long ib) const;

  /// Build a grid for (lambda, omega, alpha). The lattice is cell-centered
  /// against lambda's bounding box when that box is axis-aligned, and the
  /// box side is snapped so the frequency lattice balances the count of
  /// lattice frequencies inside omega against its volume.
  static TorusGrid build(const Domain& lambda, const Domain& omega, double alpha,
                         const Resolution& res, double extra_support = 0.0,
                         double extra_freq_support = 0.0);
};

/// Finite section of T_alpha / S_alpha or one of their factors.
struct DiscreteOperator {
  Eigen::MatrixXcd matrix;
  double alpha = 0.0;
  Backend backend = Backend::TorusFFT;
  bool hermitian_flag = false;
  bool symbol_is_one = false;  // clamp provenance for the spectral module
  std::vector<Point> nodes;    // grid nodes underlying rows/columns
  std::vector<double> weights; // quadrature weights (dense) or cell volumes (torus)
  long n_dof() const { return matrix.rows(); }
};

/// Closed-form kernel of the spectral projection P_{Omega,alpha}:
/// (alpha/2pi)^d \int_Omega e^{i alpha t.xi} dxi. At t = 0 this equals
/// alpha^d |Omega| / (2pi)^d.
Complex projection_kernel(const Domain& omega, double alpha, const Point& t);

/// Volume mesh used by the dense backend at the ppw-mandated spacing.
QuadRule dense_mesh(const Domain& lambda, const Domain& omega, double alpha,
                    const Resolution& res);

/// Nystrom discretization of T_alpha(a) over volume-quadrature nodes of
/// lambda, symmetrized weighting sqrt(w_i) K(x_i - x_j) sqrt(w_j).
/// Constant symbols only.
DiscreteOperator assemble_dense(const Symbol& a, const Domain& lambda, const Domain& omega,
                                double alpha, const Resolution& res);

/// Exact finite composition chi_Lambda P Op^l(a) P chi_Lambda on the torus
/// lattice, compressed to the lambda rows/columns. Constant and separable
/// symbols.
DiscreteOperator assemble_torus(const Symbol& a, const Domain& lambda, const Domain& omega,
                                double alpha, const TorusGrid& grid);

/// Same composition without the chi_Lambda compression (all lattice points).
DiscreteOperator assemble_fullspace(const Symbol& a, const Domain& omega, double alpha,
                                    const TorusGrid& grid, long max_points = 6000);

/// Hermitian part (M + M*)/2; realizes S_alpha when applied to T_alpha.
DiscreteOperator symmetrize(const DiscreteOperator& op);

/// Debug dump: "WHOP" magic, uint32 dim sizes, alpha, row-major re/im pairs.
void dump_operator(const DiscreteOperator& op, const std::string& path);
DiscreteOperator load_operator(const std::string& path);

/// Quantization factors on the torus as full lattice matrices, for
/// commutator and left-right difference diagnostics (d = 1 scale). Left
/// quantization evaluates the spatial factor at the output variable,
/// right quantization at the input variable.
Eigen::MatrixXcd torus_op_symbol(const Symbol& a, const TorusGrid& grid,
                                 bool right_quantization = false);
Eigen::MatrixXcd torus_projection(const Domain& omega, const TorusGrid& grid);
Eigen::VectorXd torus_indicator(const Domain& lambda, const TorusGrid& grid);

}  // namespace whop
