#include "whop/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace whop {

std::vector<Complex> trace_poly(const DiscreteOperator& op, int p_max) {
  if (p_max < 1) throw std::invalid_argument("trace_poly: p_max must be >= 1");
  const Eigen::MatrixXcd& m = op.matrix;
  if (m.rows() == 0) throw std::invalid_argument("trace_poly: empty matrix");
  std::vector<Complex> traces;
  traces.push_back(m.diagonal().sum());
  if (p_max == 1) return traces;

  // tr T^p = sum_{ij} (T^{p-1})_{ij} T_{ji}; saves the final product.
  Eigen::MatrixXcd power = m;  // T^{p-1}
  for (int p = 2; p <= p_max; ++p) {
    if (p > 2) power = (power * m).eval();
    traces.push_back((power.transpose().cwiseProduct(m)).sum());
  }
  return traces;
}

double trace_smooth(const DiscreteOperator& op, const TestFunction& g, bool clamp_unit,
                    ClampReport* report) {
  if (!op.hermitian_flag)
    throw std::invalid_argument("trace_smooth: non-Hermitian input");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.matrix,
                                                     Eigen::EigenvaluesOnly);
  ClampReport rep;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (clamp_unit) {
      const double clamped = std::clamp(lam, 0.0, 1.0);
      if (clamped != lam) {
        rep.max_clamp = std::max(rep.max_clamp, std::abs(clamped - lam));
        ++rep.n_clamped;
        lam = clamped;
      }
    }
    acc += g.eval(lam);
  }
  if (report) *report = rep;
  return acc;
}

double trace_smooth(const DiscreteOperator& op, const TestFunction& g) {
  return trace_smooth(op, g, op.symbol_is_one, nullptr);
}

double trace_norm_matrix(const Eigen::MatrixXcd& m) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().sum();
}

double trace_norm(const DiscreteOperator& op) { return trace_norm_matrix(op.matrix); }

SpectralSummary summarize(const DiscreteOperator& op, int p_max, bool with_eigenvalues,
                          bool with_trace_norm) {
  SpectralSummary s;
  s.alpha = op.alpha;
  s.backend = op.backend;
  s.n_dof = op.n_dof();
  s.traces_of_powers = trace_poly(op, p_max);
  if (with_eigenvalues) {
    if (!op.hermitian_flag)
      throw std::invalid_argument("summarize: eigenvalue list requires a Hermitian operator");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.matrix,
                                                       Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
    s.eigenvalues = std::move(ev);
  }
  if (with_trace_norm) s.trace_norm = trace_norm(op);
  return s;
}

std::vector<CommutatorRow> commutator_growth(const Symbol& b, const Domain& lambda,
                                             const Domain& omega,
                                             const std::vector<double>& alphas,
                                             const Resolution& res) {
  for (size_t i = 0; i + 1 < alphas.size(); ++i)
    if (!(alphas[i] < alphas[i + 1]))
      throw std::invalid_argument("commutator_growth: alphas must be increasing");

  const int d = lambda.dim();
  double ell = 1.0, rho = 1.0;
  double freq_support = 0.0;
  if (b.is_separable()) {
    ell = std::max(b.spatial().support_radius(), 1e-9);
    rho = std::max(b.frequency().support_radius(), 1e-9);
    freq_support = b.frequency().support_radius();
  }

  std::vector<CommutatorRow> rows;
  for (double alpha : alphas) {
    const TorusGrid grid = TorusGrid::build(lambda, omega, alpha, res,
                                            b.spatial_support_radius(), freq_support);
    const Eigen::MatrixXcd opb = torus_op_symbol(b, grid);
    const Eigen::MatrixXcd proj = torus_projection(omega, grid);
    const Eigen::VectorXd chi = torus_indicator(lambda, grid);

    const Eigen::MatrixXcd c_chi =
        opb * chi.asDiagonal() - (chi.asDiagonal() * opb).eval();
    const Eigen::MatrixXcd c_proj = opb * proj - proj * opb;

    CommutatorRow row;
    row.alpha = alpha;
    row.n_dof = grid.total_points();
    row.norm_chi = trace_norm_matrix(c_chi);
    row.norm_proj = trace_norm_matrix(c_proj);
    const double scale = std::pow(alpha, d - 1);
    row.ratio_chi = row.norm_chi / scale;
    row.ratio_proj = row.norm_proj / scale;
    row.alpha_ell_rho = alpha * ell * rho;
    rows.push_back(row);
  }
  return rows;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Complex regularized_trace_diff(const Symbol& a, const Domain& lambda, const Domain& omega,
                               double alpha, int p, const TorusGrid& grid) {
  if (p < 1) throw std::invalid_argument("regularized_trace_diff: p must be >= 1");

  if (a.is_constant()) {
    const Complex c = a.constant_value();
    if (!lambda.is_complement()) {
      // T = c * (compressed projection); chi g_p(Q^p=Q) chi shares the kernel,
      // so the difference reduces to tr T^p - c^{p-1} tr T.
      const Symbol one = Symbol::constant(1.0);
      const DiscreteOperator t = assemble_torus(one, lambda, omega, alpha, grid);
      const auto traces = trace_poly(t, p);
      return std::pow(c, p) * (traces[p - 1] - traces[0]);
    }
    // Complement Lambda: expand (1 - chi_inner) around the projection. With
    // B the inner-block of the projection and Q^m = Q,
    //   tr T^p - tr chi Q chi = (1-p) tr B + sum_{j=2..p} (-1)^j C(p,j) tr B^j.
    const Symbol one = Symbol::constant(1.0);
    const DiscreteOperator b = assemble_torus(one, lambda.inner(), omega, alpha, grid);
    const auto traces = trace_poly(b, p);
    Complex acc = (1.0 - p) * traces[0];
    for (int j = 2; j <= p; ++j)
      acc += ((j % 2 == 0) ? 1.0 : -1.0) * binomial(p, j) * traces[j - 1];
    return std::pow(c, p) * acc;
  }

  if (lambda.is_complement())
    throw std::invalid_argument(
        "regularized_trace_diff: non-constant symbols require a bounded lambda");

  const DiscreteOperator t = assemble_torus(a, lambda, omega, alpha, grid);
  const auto t_traces = trace_poly(t, p);

  const DiscreteOperator full = assemble_fullspace(a, omega, alpha, grid);
  Eigen::MatrixXcd fp = full.matrix;
  for (int j = 1; j < p; ++j) fp = (fp * full.matrix).eval();
  Complex compressed = 0.0;
  const long total = grid.total_points();
  for (long m = 0; m < total; ++m)
    if (lambda.contains(grid.node(m))) compressed += fp(m, m);
  return t_traces[p - 1] - compressed;
}

}  // namespace whop
