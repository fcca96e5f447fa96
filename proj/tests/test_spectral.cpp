#include "whop/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace whop;

namespace {
constexpr double kPi = std::numbers::pi;

DiscreteOperator from_matrix(Eigen::MatrixXcd m, bool hermitian, bool is_one = false) {
  DiscreteOperator op;
  op.matrix = std::move(m);
  op.alpha = 1.0;
  op.hermitian_flag = hermitian;
  op.symbol_is_one = is_one;
  return op;
}

DiscreteOperator torus_t1(double alpha, Resolution res = Resolution{}) {
  const Domain lam = Domain::interval(0, 1);
  const Domain omg = Domain::interval(-1, 1);
  const TorusGrid grid = TorusGrid::build(lam, omg, alpha, res);
  return assemble_torus(Symbol::constant(1.0), lam, omg, alpha, grid);
}

}  // namespace

TEST_CASE("trace_poly basics") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = 0.25;
  const auto traces = trace_poly(from_matrix(d, true), 2);
  CHECK(traces[0].real() == doctest::Approx(0.75));
  CHECK(traces[1].real() == doctest::Approx(0.3125));

  // projection: tr T^p = tr T for all p
  Eigen::MatrixXcd u(2, 1);
  u << Complex(0.6), Complex(0.8);
  const Eigen::MatrixXcd proj = u * u.adjoint();
  const auto tp = trace_poly(from_matrix(proj, true), 4);
  for (int p = 0; p < 4; ++p) CHECK(std::abs(tp[p] - tp[0]) < 1e-14);

  CHECK_THROWS(trace_poly(from_matrix(d, true), 0));
}

TEST_CASE("trace_poly on non-normal matrices") {
  Eigen::MatrixXcd m(2, 2);
  m << Complex(1.0, 0.5), Complex(2.0, -1.0), Complex(0.0, 0.0), Complex(-0.5, 0.25);
  const auto traces = trace_poly(from_matrix(m, false), 3);
  // triangular: traces of powers are sums of diagonal powers
  const Complex a = m(0, 0), b = m(1, 1);
  CHECK(std::abs(traces[0] - (a + b)) < 1e-14);
  CHECK(std::abs(traces[1] - (a * a + b * b)) < 1e-13);
  CHECK(std::abs(traces[2] - (a * a * a + b * b * b)) < 1e-13);
}

TEST_CASE("torus projection traces are monotone") {
  const DiscreteOperator t = torus_t1(25.0);
  const auto traces = trace_poly(t, 2);
  CHECK(traces[1].real() <= traces[0].real());  // spectrum in [0,1]
  CHECK(traces[0].real() > 0.0);
}

TEST_CASE("trace_smooth") {
  const DiscreteOperator t = torus_t1(25.0);

  // g(t) = t reproduces the trace
  const double tr_lin = trace_smooth(t, TestFunction::named("t_minus_t2"), false) +
                        trace_poly(t, 2)[1].real();
  CHECK(tr_lin == doctest::Approx(trace_poly(t, 1)[0].real()).epsilon(1e-9));

  // g(t) = t - t^2 is nonnegative on [0,1] spectra
  CHECK(trace_smooth(t, TestFunction::named("t_minus_t2"), true) >= 0.0);

  // polynomial-equivalent smooth g matches trace_poly
  const auto g2_smooth = TestFunction::smooth([](double x) { return x * x; },
                                              [](double x) { return 2.0 * x; }, "t2");
  const double via_eig = trace_smooth(t, g2_smooth, false);
  const double via_poly = trace_poly(t, 2)[1].real();
  CHECK(via_eig == doctest::Approx(via_poly).epsilon(1e-9));

  CHECK_THROWS(trace_smooth(from_matrix(Eigen::MatrixXcd::Random(3, 3), false),
                            TestFunction::monomial(1), false));
}

TEST_CASE("clamp report stays tiny on torus operators") {
  const DiscreteOperator t = torus_t1(40.0);
  ClampReport rep;
  trace_smooth(t, TestFunction::named("xlogx_entropy"), true, &rep);
  CHECK(rep.max_clamp < 1e-6);
}

TEST_CASE("trace_norm") {
  // Hermitian PSD: trace norm equals the trace
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(5, 5);
  const Eigen::MatrixXcd psd = a * a.adjoint();
  CHECK(trace_norm(from_matrix(psd, true)) ==
        doctest::Approx(psd.diagonal().sum().real()).epsilon(1e-10));

  // rank one
  Eigen::VectorXcd u = Eigen::VectorXcd::Random(4), v = Eigen::VectorXcd::Random(4);
  const Eigen::MatrixXcd rank1 = u * v.adjoint();
  CHECK(trace_norm(from_matrix(rank1, false)) ==
        doctest::Approx(u.norm() * v.norm()).epsilon(1e-10));

  // unitary invariance
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(5, 5);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Eigen::MatrixXcd::Random(5, 5));
  const Eigen::MatrixXcd q = qr.householderQ();
  CHECK(trace_norm_matrix(q * m) == doctest::Approx(trace_norm_matrix(m)).epsilon(1e-10));

  // trace norm dominates |tr|
  CHECK(trace_norm_matrix(m) >= std::abs(m.diagonal().sum()) - 1e-12);
}

TEST_CASE("spectral summary invariants") {
  const DiscreteOperator t = torus_t1(30.0);
  const SpectralSummary s = summarize(t, 2, true, true);
  REQUIRE(s.eigenvalues.has_value());
  CHECK(static_cast<long>(s.eigenvalues->size()) == t.n_dof());
  double sum = 0.0;
  for (double ev : *s.eigenvalues) sum += ev;
  CHECK(sum == doctest::Approx(s.traces_of_powers[0].real()).epsilon(1e-8));
  CHECK(*s.trace_norm >= std::abs(s.traces_of_powers[0]));
}

TEST_CASE("commutators vanish for one-sided symbols") {
  const Domain lam = Domain::interval(0, 1);
  const Domain omg = Domain::interval(-1, 1);
  Resolution res;

  // purely frequency-dependent symbol commutes with the projection
  const Symbol b_xi = Symbol::separable(FactorND(Factor1D::constant(1.0), 1),
                                        FactorND(Factor1D::cosine_window(0.0, 0.8), 1));
  const auto rows_xi = commutator_growth(b_xi, lam, omg, {10.0}, res);
  CHECK(rows_xi[0].norm_proj < 1e-12);

  // purely spatial symbol commutes with chi_Lambda
  const Symbol b_x = Symbol::separable(FactorND(Factor1D::cosine_window(0.5, 0.5), 1),
                                       FactorND(Factor1D::constant(1.0), 1));
  const auto rows_x = commutator_growth(b_x, lam, omg, {10.0}, res);
  CHECK(rows_x[0].norm_chi < 1e-12);
}

TEST_CASE("commutator table reports ratios") {
  const Domain lam = Domain::interval(0, 1);
  const Domain omg = Domain::interval(-1, 1);
  const Symbol b = Symbol::separable(FactorND(Factor1D::cosine_window(0.5, 0.5), 1),
                                     FactorND(Factor1D::cosine_window(0.0, 1.0), 1));
  const auto rows = commutator_growth(b, lam, omg, {10.0, 20.0}, Resolution{});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].norm_chi > 0.0);
  CHECK(rows[0].ratio_chi > 0.0);
  CHECK(rows[0].alpha_ell_rho > 0.0);
  CHECK_THROWS(commutator_growth(b, lam, omg, {20.0, 10.0}, Resolution{}));
}

TEST_CASE("regularized difference, bounded lambda") {
  const Domain lam = Domain::interval(0, 1);
  const Domain omg = Domain::interval(-1, 1);
  const double alpha = 20.0;
  const TorusGrid grid = TorusGrid::build(lam, omg, alpha, Resolution{});
  const Symbol one = Symbol::constant(1.0);

  // p = 1 vanishes exactly
  CHECK(regularized_trace_diff(one, lam, omg, alpha, 1, grid) == Complex(0.0));

  // p = 2 is forced nonpositive by the algebra
  const Complex d2 = regularized_trace_diff(one, lam, omg, alpha, 2, grid);
  CHECK(d2.real() <= 0.0);
  CHECK(std::abs(d2.imag()) < 1e-12);

  // equals -|| (1-chi) Q chi ||_HS^2
  const DiscreteOperator full = assemble_fullspace(one, omg, alpha, grid);
  const Eigen::VectorXd chi = torus_indicator(lam, grid);
  Eigen::MatrixXcd qc = full.matrix * chi.asDiagonal();
  Eigen::MatrixXcd outside = (Eigen::VectorXd::Ones(chi.size()) - chi).asDiagonal() * qc;
  CHECK(d2.real() == doctest::Approx(-outside.squaredNorm()).epsilon(1e-9));
}

TEST_CASE("regularized difference, complement lambda identity") {
  // cross-check the binomial collapse against explicit full matrices
  const Domain inner = Domain::interval(-0.5, 0.5);
  const Domain lam = Domain::complement_of(inner, {-4.0, 0}, {4.0, 0});
  const Domain omg = Domain::interval(-1, 1);
  const double alpha = 12.0;
  const TorusGrid grid = TorusGrid::build(lam, omg, alpha, Resolution{});
  const Symbol one = Symbol::constant(1.0);

  CHECK(regularized_trace_diff(one, lam, omg, alpha, 1, grid) == Complex(0.0));

  for (int p = 2; p <= 4; ++p) {
    const Complex fast = regularized_trace_diff(one, lam, omg, alpha, p, grid);

    const DiscreteOperator t_lam = assemble_torus(one, lam, omg, alpha, grid);
    const auto tr_t = trace_poly(t_lam, p);
    const DiscreteOperator full = assemble_fullspace(one, omg, alpha, grid);
    Complex tr_chi = 0.0;
    for (long m = 0; m < grid.total_points(); ++m)
      if (lam.contains(grid.node(m))) tr_chi += full.matrix(m, m);
    const Complex direct = tr_t[p - 1] - tr_chi;

    CHECK(std::abs(fast - direct) < 1e-9 * std::max(1.0, std::abs(direct)));
  }

  // non-constant symbols on a complement are refused
  const Symbol b = Symbol::separable(FactorND(Factor1D::cosine_window(0.0, 0.4), 1),
                                     FactorND(Factor1D::constant(1.0), 1));
  CHECK_THROWS_AS(regularized_trace_diff(b, lam, omg, alpha, 2, grid),
                  std::invalid_argument);
}

TEST_CASE("regularized difference, separable symbol on bounded lambda") {
  const Domain lam = Domain::interval(0, 1);
  const Domain omg = Domain::interval(-1, 1);
  const double alpha = 10.0;
  const TorusGrid grid = TorusGrid::build(lam, omg, alpha, Resolution{});
  const Symbol b = Symbol::separable(FactorND(Factor1D::cosine_window(0.5, 0.5), 1),
                                     FactorND(Factor1D::constant(1.0), 1));
  const Complex d1 = regularized_trace_diff(b, lam, omg, alpha, 1, grid);
  CHECK(std::abs(d1) < 1e-10);
  const Complex d2 = regularized_trace_diff(b, lam, omg, alpha, 2, grid);
  CHECK(std::isfinite(d2.real()));
}
