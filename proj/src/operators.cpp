#include "whop/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace whop {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// E(z) = (e^{iz} - 1)/(iz) = \int_0^1 e^{izu} du.
Complex cexp_mean(double z) {
  if (std::abs(z) < 0.5) {
    Complex term = 1.0, sum = 0.0;
    for (int k = 0; k <= 16; ++k) {
      sum += term / double(k + 1);
      term *= kI * z / double(k + 1);
    }
    return sum;
  }
  return (std::exp(kI * z) - 1.0) / (kI * z);
}

// F(a,b) = \int\int_{u,v>=0, u+v<=1} e^{i(au+bv)} dv du, symmetric in (a,b).
Complex triangle_phase_integral(double a, double b) {
  if (std::abs(a) > std::abs(b)) std::swap(a, b);
  if (std::abs(b) < 0.8) {
    // F = sum_k S_k/(k+2)!, S_k = sum_{m+n=k} (ia)^m (ib)^n
    Complex sum = 0.0;
    double fact = 2.0;  // (k+2)! running
    std::vector<Complex> apow{1.0}, bpow{1.0};
    for (int k = 0; k <= 20; ++k) {
      if (k > 0) {
        apow.push_back(apow.back() * (kI * a));
        bpow.push_back(bpow.back() * (kI * b));
        fact *= (k + 2);
      }
      Complex sk = 0.0;
      for (int m = 0; m <= k; ++m) sk += apow[m] * bpow[k - m];
      sum += sk / fact;
    }
    return sum;
  }
  return (std::exp(kI * b) * cexp_mean(a - b) - cexp_mean(a)) / (kI * b);
}

double bessel_j1_over_x(double x) {
  // J_1(x)/x with a series fallback near zero.
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 0.5 * (1.0 - x2 / 8.0 + x2 * x2 / 192.0);
  }
  return std::cyl_bessel_j(1, std::abs(x)) / std::abs(x);
}

struct FftPlan {
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<Complex> in, out;

  FftPlan(int dim, const std::array<int, 2>& n) {
    const long total = dim == 1 ? n[0] : long(n[0]) * n[1];
    in.assign(total, Complex(0.0));
    out.assign(total, Complex(0.0));
    auto* pi = reinterpret_cast<fftw_complex*>(in.data());
    auto* po = reinterpret_cast<fftw_complex*>(out.data());
    if (dim == 1) {
      fwd = fftw_plan_dft_1d(n[0], pi, po, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_1d(n[0], pi, po, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      fwd = fftw_plan_dft_2d(n[0], n[1], pi, po, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_2d(n[0], n[1], pi, po, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }
  ~FftPlan() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward() { fftw_execute(fwd); }
  void backward() { fftw_execute(bwd); }
};

}  // namespace

// ---------------------------------------------------------------------------
// TorusGrid
// ---------------------------------------------------------------------------

Point TorusGrid::node(long linear) const {
  if (dim == 1) return Point(x0[0] + (linear + 0.5) * h[0], 0.0);
  const long ix = linear / n[1], iy = linear % n[1];
  return Point(x0[0] + (ix + 0.5) * h[0], x0[1] + (iy + 0.5) * h[1]);
}

Point TorusGrid::frequency(long linear) const {
  auto axis_freq = [&](long idx, int j) {
    const long k = idx <= n[j] / 2 ? idx : idx - n[j];
    return 2.0 * kPi * double(k) / (alpha * box_len[j]);
  };
  if (dim == 1) return Point(axis_freq(linear, 0), 0.0);
  return Point(axis_freq(linear / n[1], 0), axis_freq(linear % n[1], 1));
}

long TorusGrid::wrap_diff(long ia, long ib) const {
  if (dim == 1) {
    long d0 = (ia - ib) % n[0];
    if (d0 < 0) d0 += n[0];
    return d0;
  }
  long dx = (ia / n[1] - ib / n[1]) % n[0];
  long dy = (ia % n[1] - ib % n[1]) % n[1];
  if (dx < 0) dx += n[0];
  if (dy < 0) dy += n[1];
  return dx * n[1] + dy;
}

namespace {

// Count lattice frequencies inside omega for a candidate grid; returns the
// relative deviation of the count from the volume density.
double frequency_count_error(const Domain& omega, double alpha, int dim,
                             const std::array<int, 2>& n,
                             const std::array<double, 2>& box_len) {
  TorusGrid g;
  g.dim = dim;
  g.alpha = alpha;
  g.n = n;
  g.box_len = box_len;
  long count = 0;
  const long total = g.total_points();
  for (long m = 0; m < total; ++m)
    if (omega.contains(g.frequency(m))) ++count;
  double ideal = omega.volume();
  for (int j = 0; j < dim; ++j) ideal *= alpha * box_len[j] / (2.0 * kPi);
  if (ideal <= 0.0) return 1.0;
  return std::abs(double(count) - ideal) / ideal;
}

}  // namespace

TorusGrid TorusGrid::build(const Domain& lambda, const Domain& omega, double alpha,
                           const Resolution& res, double extra_support,
                           double extra_freq_support) {
  if (!(alpha > 0)) throw GuardError("torus grid: alpha must be positive");
  if (res.n_override == 0 && res.ppw < 6.0)
    throw GuardError("torus grid: points-per-wavelength guard requires ppw >= 6");
  if (res.pad_factor < 2.0)
    throw GuardError("torus grid: padding guard requires pad_factor >= 2");
  if (lambda.dim() != omega.dim())
    throw GuardError("torus grid: lambda and omega dimensions differ");

  TorusGrid g;
  g.dim = lambda.dim();
  g.alpha = alpha;

  // Alignment target: the chi_Lambda discontinuity, i.e. the inner shape of a
  // complement, otherwise lambda itself.
  const Domain& align_shape = lambda.is_complement() ? lambda.inner() : lambda;
  Point alo, ahi;
  align_shape.bounding_box(alo, ahi);
  if (extra_support > 0.0) {
    for (int j = 0; j < g.dim; ++j) {
      alo[j] = std::min(alo[j], -extra_support);
      ahi[j] = std::max(ahi[j], extra_support);
    }
  }

  const bool aligned_box = align_shape.kind() == ShapeKind::Interval ||
                           align_shape.kind() == ShapeKind::Box;
  const bool omega_box =
      omega.kind() == ShapeKind::Interval || omega.kind() == ShapeKind::Box;

  std::array<int, 2> n_in{0, 0};
  std::array<double, 2> h_target{0.0, 0.0}, span{0.0, 0.0}, lmax{0.0, 0.0};
  for (int j = 0; j < g.dim; ++j) {
    const double freq_extent = std::max(omega.sup_abs(j), extra_freq_support);
    if (!(freq_extent > 0))
      throw GuardError("torus grid: omega has no extent on axis " + std::to_string(j));
    h_target[j] = 2.0 * kPi / (res.ppw * alpha * freq_extent);
    span[j] = ahi[j] - alo[j];
    lmax[j] = lambda.is_complement() ? lambda.hi()[j] - lambda.lo()[j]
                                     : std::numeric_limits<double>::infinity();
    if (res.pad_factor * span[j] > lmax[j])
      throw GuardError(
          "torus grid: bounding box of the complement is smaller than pad_factor * inner extent");
  }

  auto odd_ceil = [](double x) {
    int n = int(std::ceil(x - 1e-9));
    return n % 2 == 0 ? n + 1 : n;
  };

  if (res.n_override > 0) {
    for (int j = 0; j < g.dim; ++j) {
      int N = res.n_override;
      if (N % 2 == 0) ++N;
      const double freq_extent = std::max(omega.sup_abs(j), extra_freq_support);
      const double L = res.pad_factor * span[j];
      const int required = int(std::ceil(res.ppw * alpha * L * freq_extent / (2.0 * kPi)));
      if (N < required)
        throw GuardError("torus grid: N override " + std::to_string(N) +
                         " below resolution guard, required N >= " + std::to_string(required));
      g.n[j] = N;
      g.h[j] = L / N;
      g.box_len[j] = L;
      n_in[j] = std::max(1, int(std::ceil(span[j] / g.h[j] - 1e-9)));
    }
  } else if (aligned_box && omega_box) {
    // Joint per-axis scan over (cells across lambda, lattice size): the cell
    // count pins the lattice to lambda's box exactly, and among admissible N
    // the frequency lattice is snapped so its count across omega matches the
    // volume density.
    for (int j = 0; j < g.dim; ++j) {
      const double wlo = omega.lo()[j], whi = omega.hi()[j];
      const int n_in_min = std::max(1, int(std::ceil(span[j] / h_target[j] - 1e-9)));
      double best_err = std::numeric_limits<double>::infinity();
      int best_nin = n_in_min, best_N = 0;
      for (int nin = n_in_min; nin <= n_in_min + 10; ++nin) {
        const double h = span[j] / nin;
        const int Nlo = odd_ceil(res.pad_factor * span[j] / h);
        const double nhi_d =
            std::min(lmax[j] / h, res.pad_factor * span[j] * 1.7 / h + 41.0);
        const int Nhi = int(std::min(nhi_d, 1e8));
        for (int N = Nlo; N <= Nhi; N += 2) {
          const double dxi = 2.0 * kPi / (alpha * N * h);
          const long kmax = (N - 1) / 2;
          const long k_hi = std::min<long>(kmax, (long)std::floor(whi / dxi));
          const long k_lo = std::max<long>(-kmax, (long)std::ceil(wlo / dxi));
          const double ideal = (whi - wlo) / dxi;
          const double err = std::abs(double(k_hi - k_lo + 1) - ideal) / ideal;
          if (err < best_err - 1e-12) {
            best_err = err;
            best_nin = nin;
            best_N = N;
          }
        }
      }
      if (best_N == 0) throw GuardError("torus grid: no admissible lattice on axis " +
                                        std::to_string(j));
      n_in[j] = best_nin;
      g.h[j] = span[j] / best_nin;
      g.n[j] = best_N;
      g.box_len[j] = best_N * g.h[j];
    }
  } else {
    // Non-factorizing omega (or unaligned lambda): keep lambda alignment when
    // available and snap the common lattice size against the full count.
    for (int j = 0; j < g.dim; ++j) {
      n_in[j] = std::max(1, int(std::ceil(span[j] / h_target[j] - 1e-9)));
      g.h[j] = aligned_box ? span[j] / n_in[j] : h_target[j];
    }
    std::array<int, 2> nlo{0, 0}, cand{0, 0};
    int steps = std::numeric_limits<int>::max();
    for (int j = 0; j < g.dim; ++j) {
      nlo[j] = odd_ceil(res.pad_factor * span[j] / g.h[j]);
      const double nhi_d = std::min(lmax[j] / g.h[j],
                                    res.pad_factor * span[j] * 1.7 / g.h[j] + 41.0);
      steps = std::min(steps, (int(std::min(nhi_d, 1e8)) - nlo[j]) / 2);
    }
    steps = std::max(0, std::min(steps, 40));
    double best_err = std::numeric_limits<double>::infinity();
    std::array<int, 2> best = nlo;
    for (int s = 0; s <= steps; ++s) {
      for (int j = 0; j < g.dim; ++j) cand[j] = nlo[j] + 2 * s;
      std::array<double, 2> bl{cand[0] * g.h[0], g.dim == 2 ? cand[1] * g.h[1] : 0.0};
      const double err = frequency_count_error(omega, alpha, g.dim, cand, bl);
      if (err < best_err) {
        best_err = err;
        best = cand;
      }
    }
    g.n = best;
    for (int j = 0; j < g.dim; ++j) g.box_len[j] = g.n[j] * g.h[j];
  }

  for (int j = 0; j < g.dim; ++j) {
    const int pad_cells = g.n[j] - n_in[j];
    if (pad_cells < 0) throw GuardError("torus grid: lattice does not cover lambda");
    g.x0[j] = alo[j] - (pad_cells / 2) * g.h[j];
    // frequency coverage: pi (N-1) / (alpha N h) must exceed sup |xi_j|
    const double xi_max = kPi * (g.n[j] - 1) / (alpha * g.n[j] * g.h[j]);
    if (xi_max <= std::max(omega.sup_abs(j), extra_freq_support))
      throw GuardError("torus grid: frequency range does not cover omega on axis " +
                       std::to_string(j));
  }
  g.freq_count_rel_error =
      frequency_count_error(omega, alpha, g.dim, g.n, g.box_len);
  g.budget_mb = res.budget_mb;
  return g;
}

// ---------------------------------------------------------------------------
// Projection kernel
// ---------------------------------------------------------------------------

Complex projection_kernel(const Domain& omega, double alpha, const Point& t) {
  const int d = omega.dim();
  const double pref = std::pow(alpha / (2.0 * kPi), d);
  switch (omega.kind()) {
    case ShapeKind::Interval:
    case ShapeKind::Box: {
      Complex v = pref;
      for (int j = 0; j < d; ++j) {
        const double c = 0.5 * (omega.lo()[j] + omega.hi()[j]);
        const double half = 0.5 * (omega.hi()[j] - omega.lo()[j]);
        v *= 2.0 * half * sinc(alpha * t[j] * half) * std::exp(kI * (alpha * t[j] * c));
      }
      return v;
    }
    case ShapeKind::Ball: {
      const double r = t.norm();
      const double R = omega.radius();
      const Complex phase = std::exp(kI * (alpha * t.dot(omega.center())));
      // (alpha/2pi)^2 * 2 pi R^2 * J1(alpha R r)/(alpha R r)
      return pref * 2.0 * kPi * R * R * bessel_j1_over_x(alpha * R * r) * phase;
    }
    case ShapeKind::Polygon: {
      Complex sum = 0.0;
      for (const auto& tri : omega.triangles()) {
        const Point e1 = tri[1] - tri[0];
        const Point e2 = tri[2] - tri[0];
        const double area2 = e1.x() * e2.y() - e1.y() * e2.x();
        const double a = alpha * t.dot(e1);
        const double b = alpha * t.dot(e2);
        sum += area2 * std::exp(kI * (alpha * t.dot(tri[0]))) * triangle_phase_integral(a, b);
      }
      return pref * sum;
    }
    case ShapeKind::Complement:
      throw std::invalid_argument("projection_kernel: unsupported shape (complement)");
  }
  throw std::logic_error("projection_kernel: unreachable");
}

// ---------------------------------------------------------------------------
// Dense (Nystrom) backend
// ---------------------------------------------------------------------------

QuadRule dense_mesh(const Domain& lambda, const Domain& omega, double alpha,
                    const Resolution& res) {
  if (lambda.is_complement())
    throw std::invalid_argument("dense backend: lambda must be bounded");
  if (!(alpha > 0)) throw GuardError("dense backend: alpha must be positive");

  double freq_extent = 0.0;
  for (int j = 0; j < omega.dim(); ++j) freq_extent = std::max(freq_extent, omega.sup_abs(j));
  const double h_max = 2.0 * kPi / (res.ppw * alpha * freq_extent);
  constexpr int kNodesPerPanel = 12;
  int level = std::max(1, int(std::ceil(lambda.max_extent() / (kNodesPerPanel * h_max))));
  if (res.n_override > 0) {
    const int required = int(std::ceil(lambda.max_extent() / h_max));
    if (res.n_override < required)
      throw GuardError("dense backend: node override " + std::to_string(res.n_override) +
                       " below resolution guard, required nodes per axis >= " +
                       std::to_string(required));
    level = std::max(1, int(std::ceil(res.n_override / double(kNodesPerPanel))));
  }
  return volume_quadrature(lambda, level);
}

DiscreteOperator assemble_dense(const Symbol& a, const Domain& lambda, const Domain& omega,
                                double alpha, const Resolution& res) {
  if (!a.is_constant())
    throw std::invalid_argument("assemble_dense: non-constant symbol on this backend");
  const QuadRule rule = dense_mesh(lambda, omega, alpha, res);
  const long n = static_cast<long>(rule.nodes.size());
  const double mbytes = 16.0 * double(n) * double(n) / (1024.0 * 1024.0);
  if (mbytes > res.budget_mb)
    throw GuardError("assemble_dense: matrix of " + std::to_string(n) + "^2 needs " +
                     std::to_string(long(mbytes)) + " MB, over budget");

  DiscreteOperator op;
  op.alpha = alpha;
  op.backend = Backend::AnalyticDense;
  op.nodes = rule.nodes;
  op.weights = rule.weights;
  const Complex scale = a.constant_value();
  op.symbol_is_one = (scale == Complex(1.0));
  op.hermitian_flag = (scale.imag() == 0.0);

  std::vector<double> sq(n);
  for (long i = 0; i < n; ++i) sq[i] = std::sqrt(rule.weights[i]);
  op.matrix.resize(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = i; j < n; ++j) {
      const Complex k = projection_kernel(omega, alpha, rule.nodes[i] - rule.nodes[j]);
      op.matrix(i, j) = scale * sq[i] * k * sq[j];
      if (j != i) op.matrix(j, i) = scale * sq[j] * std::conj(k) * sq[i];
    }
  }
  return op;
}

// ---------------------------------------------------------------------------
// Torus (FFT) backend
// ---------------------------------------------------------------------------

namespace {

std::vector<double> omega_mask(const Domain& omega, const TorusGrid& grid) {
  const long total = grid.total_points();
  std::vector<double> mask(total, 0.0);
  for (long m = 0; m < total; ++m)
    if (omega.contains(grid.frequency(m))) mask[m] = 1.0;
  return mask;
}

// Convolution kernel p[delta] = (1/N^d) sum_k mask_k e^{2 pi i k delta / N},
// with Hermitian symmetry enforced exactly.
std::vector<Complex> mask_kernel(const std::vector<double>& mask, const TorusGrid& grid) {
  FftPlan plan(grid.dim, grid.n);
  const long total = grid.total_points();
  for (long m = 0; m < total; ++m) plan.in[m] = mask[m];
  plan.backward();
  std::vector<Complex> p(total);
  const double norm = 1.0 / double(total);
  for (long m = 0; m < total; ++m) p[m] = plan.out[m] * norm;
  for (long m = 0; m < total; ++m) {
    const long rm = grid.wrap_diff(0, m);  // index of -m
    if (rm < m) continue;
    const Complex avg = 0.5 * (p[m] + std::conj(p[rm]));
    p[m] = avg;
    p[rm] = std::conj(avg);
  }
  return p;
}

std::vector<long> node_list(const Domain& lambda, const TorusGrid& grid) {
  std::vector<long> idx;
  const long total = grid.total_points();
  for (long m = 0; m < total; ++m)
    if (lambda.contains(grid.node(m))) idx.push_back(m);
  return idx;
}

void fill_grid_meta(DiscreteOperator& op, const TorusGrid& grid,
                    const std::vector<long>& nodes) {
  const double cell = grid.dim == 1 ? grid.h[0] : grid.h[0] * grid.h[1];
  op.nodes.reserve(nodes.size());
  for (long m : nodes) op.nodes.push_back(grid.node(m));
  op.weights.assign(nodes.size(), cell);
}

}  // namespace

DiscreteOperator assemble_torus(const Symbol& a, const Domain& lambda, const Domain& omega,
                                double alpha, const TorusGrid& grid) {
  if (std::abs(alpha - grid.alpha) > 1e-12 * std::max(1.0, alpha))
    throw GuardError("assemble_torus: grid was built for a different alpha");
  const std::vector<long> lam = node_list(lambda, grid);
  const long nl = static_cast<long>(lam.size());
  if (nl == 0) throw GuardError("assemble_torus: no lattice nodes inside lambda");
  const double mbytes = 16.0 * double(nl) * double(nl) / (1024.0 * 1024.0);
  if (mbytes > grid.budget_mb)
    throw GuardError("assemble_torus: matrix of " + std::to_string(nl) + "^2 needs " +
                     std::to_string(long(mbytes + 1)) + " MB, over budget");

  DiscreteOperator op;
  op.alpha = alpha;
  op.backend = Backend::TorusFFT;
  fill_grid_meta(op, grid, lam);

  const std::vector<double> mask = omega_mask(omega, grid);

  if (a.is_constant()) {
    const Complex scale = a.constant_value();
    op.symbol_is_one = (scale == Complex(1.0));
    op.hermitian_flag = (scale.imag() == 0.0);
    const std::vector<Complex> p = mask_kernel(mask, grid);
    op.matrix.resize(nl, nl);
    for (long r = 0; r < nl; ++r)
      for (long c = 0; c < nl; ++c)
        op.matrix(r, c) = scale * p[grid.wrap_diff(lam[r], lam[c])];
    return op;
  }

  if (!a.is_separable())
    throw std::invalid_argument("assemble_torus: symbol must be constant or separable");

  const long total = grid.total_points();
  std::vector<double> u_vals(total);
  for (long m = 0; m < total; ++m) u_vals[m] = a.spatial().eval(grid.node(m), grid.dim);
  std::vector<Complex> vmask(total);
  for (long m = 0; m < total; ++m)
    vmask[m] = mask[m] * a.scale() * a.frequency().eval(grid.frequency(m), grid.dim);

  FftPlan plan(grid.dim, grid.n);
  op.matrix.resize(nl, nl);
  const double norm = 1.0 / double(total);
  std::vector<Complex> work(total);
  for (long c = 0; c < nl; ++c) {
    std::fill(plan.in.begin(), plan.in.end(), Complex(0.0));
    plan.in[lam[c]] = 1.0;
    plan.forward();
    for (long m = 0; m < total; ++m) plan.in[m] = plan.out[m] * vmask[m];
    plan.backward();
    for (long m = 0; m < total; ++m) work[m] = plan.out[m] * norm * u_vals[m];
    for (long m = 0; m < total; ++m) plan.in[m] = work[m];
    plan.forward();
    for (long m = 0; m < total; ++m) plan.in[m] = plan.out[m] * mask[m];
    plan.backward();
    for (long r = 0; r < nl; ++r) op.matrix(r, c) = plan.out[lam[r]] * norm;
  }
  op.hermitian_flag = false;
  return op;
}

DiscreteOperator assemble_fullspace(const Symbol& a, const Domain& omega, double alpha,
                                    const TorusGrid& grid, long max_points) {
  const long total = grid.total_points();
  if (total > max_points)
    throw GuardError("assemble_fullspace: lattice of " + std::to_string(total) +
                     " points exceeds the dense materialization cap");
  std::vector<long> all(total);
  for (long m = 0; m < total; ++m) all[m] = m;

  DiscreteOperator op;
  op.alpha = alpha;
  op.backend = Backend::TorusFFT;
  fill_grid_meta(op, grid, all);
  const std::vector<double> mask = omega_mask(omega, grid);

  if (a.is_constant()) {
    const Complex scale = a.constant_value();
    op.symbol_is_one = (scale == Complex(1.0));
    op.hermitian_flag = (scale.imag() == 0.0);
    const std::vector<Complex> p = mask_kernel(mask, grid);
    op.matrix.resize(total, total);
    for (long r = 0; r < total; ++r)
      for (long c = 0; c < total; ++c)
        op.matrix(r, c) = scale * p[grid.wrap_diff(r, c)];
    return op;
  }
  if (!a.is_separable())
    throw std::invalid_argument("assemble_fullspace: symbol must be constant or separable");

  // Fourier-diagonal factors around diag(u): Q Op^l(a) Q on the full lattice.
  Eigen::MatrixXcd m = torus_op_symbol(a, grid);
  Eigen::MatrixXcd q = torus_projection(omega, grid);
  op.matrix = q * m * q;
  op.hermitian_flag = false;
  return op;
}

DiscreteOperator symmetrize(const DiscreteOperator& op) {
  DiscreteOperator out = op;
  out.matrix = 0.5 * (op.matrix + op.matrix.adjoint());
  out.hermitian_flag = true;
  return out;
}

Eigen::MatrixXcd torus_op_symbol(const Symbol& a, const TorusGrid& grid,
                                 bool right_quantization) {
  const long total = grid.total_points();
  if (total > 6000)
    throw GuardError("torus_op_symbol: lattice too large for a dense factor matrix");
  if (a.is_constant())
    return Eigen::MatrixXcd::Identity(total, total) * a.constant_value();
  if (!a.is_separable())
    throw std::invalid_argument("torus_op_symbol: symbol must be constant or separable");

  FftPlan plan(grid.dim, grid.n);
  for (long m = 0; m < total; ++m)
    plan.in[m] = a.scale() * a.frequency().eval(grid.frequency(m), grid.dim);
  plan.backward();
  std::vector<Complex> vker(total);
  for (long m = 0; m < total; ++m) vker[m] = plan.out[m] / double(total);

  Eigen::MatrixXcd mat(total, total);
  for (long r = 0; r < total; ++r) {
    for (long c = 0; c < total; ++c) {
      const double u =
          a.spatial().eval(grid.node(right_quantization ? c : r), grid.dim);
      mat(r, c) = u * vker[grid.wrap_diff(r, c)];
    }
  }
  return mat;
}

Eigen::MatrixXcd torus_projection(const Domain& omega, const TorusGrid& grid) {
  const long total = grid.total_points();
  if (total > 6000)
    throw GuardError("torus_projection: lattice too large for a dense factor matrix");
  const std::vector<Complex> p = mask_kernel(omega_mask(omega, grid), grid);
  Eigen::MatrixXcd mat(total, total);
  for (long r = 0; r < total; ++r)
    for (long c = 0; c < total; ++c) mat(r, c) = p[grid.wrap_diff(r, c)];
  return mat;
}

Eigen::VectorXd torus_indicator(const Domain& lambda, const TorusGrid& grid) {
  const long total = grid.total_points();
  Eigen::VectorXd chi(total);
  for (long m = 0; m < total; ++m) chi(m) = lambda.contains(grid.node(m)) ? 1.0 : 0.0;
  return chi;
}

// ---------------------------------------------------------------------------
// Binary dump
// ---------------------------------------------------------------------------

void dump_operator(const DiscreteOperator& op, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("dump_operator: cannot open " + path);
  f.write("WHOP", 4);
  const std::uint64_t rows = op.matrix.rows(), cols = op.matrix.cols();
  f.write(reinterpret_cast<const char*>(&rows), 8);
  f.write(reinterpret_cast<const char*>(&cols), 8);
  f.write(reinterpret_cast<const char*>(&op.alpha), 8);
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      const Complex v = op.matrix(i, j);
      const double re = v.real(), im = v.imag();
      f.write(reinterpret_cast<const char*>(&re), 8);
      f.write(reinterpret_cast<const char*>(&im), 8);
    }
  }
}

DiscreteOperator load_operator(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_operator: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (std::memcmp(magic, "WHOP", 4) != 0)
    throw std::runtime_error("load_operator: bad magic in " + path);
  std::uint64_t rows = 0, cols = 0;
  double alpha = 0.0;
  f.read(reinterpret_cast<char*>(&rows), 8);
  f.read(reinterpret_cast<char*>(&cols), 8);
  f.read(reinterpret_cast<char*>(&alpha), 8);
  DiscreteOperator op;
  op.alpha = alpha;
  op.matrix.resize(rows, cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      double re, im;
      f.read(reinterpret_cast<char*>(&re), 8);
      f.read(reinterpret_cast<char*>(&im), 8);
      op.matrix(i, j) = Complex(re, im);
    }
  }
  if (!f) throw std::runtime_error("load_operator: truncated file " + path);
  return op;
}

}  // namespace whop
