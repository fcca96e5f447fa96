#include "whop/harness.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace whop;

namespace {

Factor1D make_factor(const std::string& kind, double center, double width, double value,
                     const std::vector<double>& coeffs) {
  if (kind == "constant") return Factor1D::constant(value);
  if (kind == "gaussian_bump") return Factor1D::gaussian_bump(center, width);
  if (kind == "cosine_window") return Factor1D::cosine_window(center, width);
  if (kind == "poly_bump") return Factor1D::poly_bump(coeffs, center, width);
  throw std::invalid_argument("unknown factor kind: " + kind);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite sections of Wiener-Hopf operators with discontinuous symbols: "
            "trace asymptotics, coefficient quadratures, sweep harness";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<GuardError>(m, "GuardError");

  py::class_<Domain>(m, "Domain")
      .def_static("interval", &Domain::interval, py::arg("a"), py::arg("b"))
      .def_static("box",
                  [](std::pair<double, double> lo, std::pair<double, double> hi) {
                    return Domain::box(Point(lo.first, lo.second),
                                       Point(hi.first, hi.second));
                  })
      .def_static("ball",
                  [](std::pair<double, double> center, double radius) {
                    return Domain::ball(Point(center.first, center.second), radius);
                  })
      .def_static("polygon",
                  [](const std::vector<std::pair<double, double>>& verts) {
                    std::vector<Point> pts;
                    for (const auto& [x, y] : verts) pts.emplace_back(x, y);
                    return Domain::polygon(std::move(pts));
                  })
      .def_static("complement_of",
                  [](const Domain& inner, std::pair<double, double> lo,
                     std::pair<double, double> hi) {
                    return Domain::complement_of(inner, Point(lo.first, lo.second),
                                                 Point(hi.first, hi.second));
                  })
      .def_property_readonly("dim", &Domain::dim)
      .def("contains",
           [](const Domain& d, double x, double y) { return d.contains(Point(x, y)); },
           py::arg("x"), py::arg("y") = 0.0)
      .def("volume", &Domain::volume)
      .def("lipschitz_M", [](const Domain& d) { return d.lipschitz_data().M; })
      .def("singular_points", [](const Domain& d) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : d.lipschitz_data().singular_points)
          pts.emplace_back(p.x(), p.y());
        return pts;
      });

  py::class_<Symbol>(m, "Symbol")
      .def_static("constant", [](Complex c) { return Symbol::constant(c); })
      .def_static(
          "separable",
          [](const std::string& spatial_kind, double s_center, double s_width,
             const std::string& freq_kind, double f_center, double f_width, int dim,
             Complex scale) {
            return Symbol::separable(
                FactorND(make_factor(spatial_kind, s_center, s_width, 1.0, {}), dim),
                FactorND(make_factor(freq_kind, f_center, f_width, 1.0, {}), dim), scale);
          },
          py::arg("spatial_kind"), py::arg("spatial_center"), py::arg("spatial_width"),
          py::arg("freq_kind"), py::arg("freq_center"), py::arg("freq_width"),
          py::arg("dim") = 1, py::arg("scale") = Complex(1.0))
      .def("eval",
           [](const Symbol& s, std::pair<double, double> x, std::pair<double, double> xi,
              int dim) {
             return s.eval(Point(x.first, x.second), Point(xi.first, xi.second), dim);
           },
           py::arg("x"), py::arg("xi"), py::arg("dim") = 1)
      .def_property_readonly("is_constant", &Symbol::is_constant)
      .def_property_readonly("is_real", &Symbol::is_real);

  m.def("norm_estimate", &norm_estimate, py::arg("symbol"), py::arg("n"), py::arg("m"),
        py::arg("ell"), py::arg("rho"), py::arg("dim") = 1);

  py::class_<TestFunction>(m, "TestFunction")
      .def_static("polynomial", &TestFunction::polynomial, py::arg("coeffs"),
                  "coeffs[k] multiplies t^(k+1); the constant term is zero")
      .def_static("monomial", &TestFunction::monomial, py::arg("p"))
      .def_static("named", &TestFunction::named, py::arg("name"))
      .def("__call__", [](const TestFunction& g, Complex t) { return g.eval(t); })
      .def_property_readonly("is_polynomial", &TestFunction::is_polynomial);

  m.def("coeff_A", &coeff_A, py::arg("g"), py::arg("s"));
  m.def("coeff_A_quadrature", &coeff_A_quadrature, py::arg("g"), py::arg("s"),
        py::arg("level") = 8);
  m.def(
      "w0_geometry",
      [](const Domain& lam, const Domain& omg, int level) {
        return coeff_W0([](const Point&, const Point&) { return Complex(1.0); }, lam, omg,
                        level);
      },
      py::arg("lam"), py::arg("omega"), py::arg("level") = 4);
  m.def(
      "w1_geometry",
      [](const Domain& lam, const Domain& omg, int level) {
        return coeff_W1([](const Point&, const Point&) { return Complex(1.0); },
                        lam.boundary_patches(), omg.boundary_patches(), level, lam.dim());
      },
      py::arg("lam"), py::arg("omega"), py::arg("level") = 6);

  py::class_<Prediction>(m, "Prediction")
      .def_readonly("w0", &Prediction::w0)
      .def_readonly("w1", &Prediction::w1)
      .def_readonly("symmetrized", &Prediction::symmetrized);
  m.def("predict", &predict, py::arg("g"), py::arg("a"), py::arg("lam"), py::arg("omega"),
        py::arg("symmetrized") = false, py::arg("level_volume") = 4,
        py::arg("level_surface") = 6);

  py::class_<Resolution>(m, "Resolution")
      .def(py::init<>())
      .def_readwrite("ppw", &Resolution::ppw)
      .def_readwrite("pad_factor", &Resolution::pad_factor)
      .def_readwrite("n_override", &Resolution::n_override)
      .def_readwrite("budget_mb", &Resolution::budget_mb);

  py::class_<TorusGrid>(m, "TorusGrid")
      .def_static("build", &TorusGrid::build, py::arg("lam"), py::arg("omega"),
                  py::arg("alpha"), py::arg("res") = Resolution{},
                  py::arg("extra_support") = 0.0, py::arg("extra_freq_support") = 0.0)
      .def_property_readonly("n", [](const TorusGrid& g) { return g.n; })
      .def_property_readonly("box_len", [](const TorusGrid& g) { return g.box_len; })
      .def_readonly("freq_count_rel_error", &TorusGrid::freq_count_rel_error);

  py::class_<DiscreteOperator>(m, "DiscreteOperator")
      .def_property_readonly("matrix",
                             [](const DiscreteOperator& op) { return op.matrix; })
      .def_readonly("alpha", &DiscreteOperator::alpha)
      .def_readonly("hermitian", &DiscreteOperator::hermitian_flag)
      .def_property_readonly("n_dof", &DiscreteOperator::n_dof)
      .def_property_readonly("backend", [](const DiscreteOperator& op) {
        return to_string(op.backend);
      });

  m.def("assemble_dense", &assemble_dense, py::arg("a"), py::arg("lam"), py::arg("omega"),
        py::arg("alpha"), py::arg("res") = Resolution{});
  m.def(
      "assemble_torus",
      [](const Symbol& a, const Domain& lam, const Domain& omg, double alpha,
         const Resolution& res) {
        const TorusGrid grid =
            TorusGrid::build(lam, omg, alpha, res, a.spatial_support_radius());
        return assemble_torus(a, lam, omg, alpha, grid);
      },
      py::arg("a"), py::arg("lam"), py::arg("omega"), py::arg("alpha"),
      py::arg("res") = Resolution{});
  m.def("symmetrize", &symmetrize, py::arg("op"));
  m.def("projection_kernel",
        [](const Domain& omg, double alpha, std::pair<double, double> t) {
          return projection_kernel(omg, alpha, Point(t.first, t.second));
        });

  m.def("trace_poly", &trace_poly, py::arg("op"), py::arg("p_max"));
  m.def("trace_smooth",
        [](const DiscreteOperator& op, const TestFunction& g) {
          return trace_smooth(op, g);
        },
        py::arg("op"), py::arg("g"));
  m.def("trace_norm", &trace_norm, py::arg("op"));
  m.def(
      "regularized_trace_diff",
      [](const Symbol& a, const Domain& lam, const Domain& omg, double alpha, int p,
         const Resolution& res) {
        const TorusGrid grid =
            TorusGrid::build(lam, omg, alpha, res, a.spatial_support_radius());
        return regularized_trace_diff(a, lam, omg, alpha, p, grid);
      },
      py::arg("a"), py::arg("lam"), py::arg("omega"), py::arg("alpha"), py::arg("p"),
      py::arg("res") = Resolution{});

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("c_log", &FitResult::c_log)
      .def_readonly("c_plain", &FitResult::c_plain)
      .def_readonly("w0_fitted", &FitResult::w0_fitted)
      .def_readonly("residual_norm", &FitResult::residual_norm)
      .def_readonly("condition", &FitResult::condition)
      .def_readonly("n_used", &FitResult::n_used);
  m.def("fit_log_coefficient", &fit_log_coefficient, py::arg("alpha_trace"),
        py::arg("w0_known") = std::nullopt, py::arg("d") = 1, py::arg("window_lo") = 0.0,
        py::arg("window_hi") = std::numeric_limits<double>::infinity());

  m.def(
      "run_config_json",
      [](const std::string& text) {
        const ExperimentConfig cfg = ExperimentConfig::parse(Config::from_string(text));
        return report_json(run(cfg));
      },
      py::arg("config_text"),
      "Run an experiment from config text and return the JSON report string");
  m.def("resolve_config_path", &resolve_config_path, py::arg("name_or_path"));
}
