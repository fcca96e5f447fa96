#include "whop/harness.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

namespace whop {

using nlohmann::json;

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::TraceSweep: return "trace_sweep";
    case RunMode::RegularizedDiff: return "regularized_diff";
    case RunMode::CommutatorDiag: return "commutator_diag";
    case RunMode::CoeffOnly: return "coeff_only";
  }
  return "?";
}

std::string to_string(Backend backend) {
  return backend == Backend::AnalyticDense ? "dense" : "torus";
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

Point point_from_list(const std::vector<double>& v, int dim, const std::string& key) {
  if (static_cast<int>(v.size()) < dim)
    throw ConfigError("config key " + key + ": expected " + std::to_string(dim) + " numbers");
  return dim == 1 ? Point(v[0], 0.0) : Point(v[0], v[1]);
}

Factor1D parse_factor(const Config& cfg, const std::string& section) {
  const std::string kind = cfg.get_string(section + ".kind", "constant");
  if (kind == "constant") return Factor1D::constant(cfg.get_double(section + ".value", 1.0));
  if (kind == "gaussian_bump")
    return Factor1D::gaussian_bump(cfg.get_double(section + ".center", 0.0),
                                   cfg.get_double(section + ".width"));
  if (kind == "cosine_window")
    return Factor1D::cosine_window(cfg.get_double(section + ".center", 0.0),
                                   cfg.get_double(section + ".width"));
  if (kind == "poly_bump")
    return Factor1D::poly_bump(cfg.get_list(section + ".coeffs"),
                               cfg.get_double(section + ".center", 0.0),
                               cfg.get_double(section + ".width"));
  throw ConfigError("config section " + section + ": unknown factor kind '" + kind + "'");
}

Symbol parse_symbol(const Config& cfg, int dim) {
  const std::string kind = cfg.get_string("symbol.kind", "constant");
  if (kind == "constant") {
    const double re = cfg.get_double("symbol.value", 1.0);
    const double im = cfg.get_double("symbol.value_im", 0.0);
    return Symbol::constant(Complex(re, im));
  }
  if (kind == "separable") {
    const double re = cfg.get_double("symbol.scale", 1.0);
    const double im = cfg.get_double("symbol.scale_im", 0.0);
    return Symbol::separable(FactorND(parse_factor(cfg, "symbol.spatial"), dim),
                             FactorND(parse_factor(cfg, "symbol.frequency"), dim),
                             Complex(re, im));
  }
  throw ConfigError("symbol.kind: unknown kind '" + kind + "'");
}

TestFunction parse_g(const Config& cfg) {
  const std::string kind = cfg.get_string("g.kind", "poly");
  if (kind == "poly") return TestFunction::polynomial(cfg.get_list("g.coeffs"));
  if (kind == "monomial") return TestFunction::monomial(cfg.get_int("g.p", 1));
  if (kind == "named") return TestFunction::named(cfg.get_string("g.name"));
  throw ConfigError("g.kind: unknown kind '" + kind + "'");
}

}  // namespace

Domain ExperimentConfig::parse_domain(const Config& cfg, const std::string& section,
                                      int dim) {
  const std::string kind = cfg.get_string(section + ".kind");
  if (kind == "interval")
    return Domain::interval(cfg.get_double(section + ".lo"), cfg.get_double(section + ".hi"));
  if (kind == "box") {
    if (dim == 1)
      return Domain::interval(cfg.get_double(section + ".lo"),
                              cfg.get_double(section + ".hi"));
    return Domain::box(point_from_list(cfg.get_list(section + ".lo"), 2, section + ".lo"),
                       point_from_list(cfg.get_list(section + ".hi"), 2, section + ".hi"));
  }
  if (kind == "ball")
    return Domain::ball(
        point_from_list(cfg.get_list(section + ".center"), 2, section + ".center"),
        cfg.get_double(section + ".radius"));
  if (kind == "polygon") {
    const auto flat = cfg.get_list(section + ".vertices");
    if (flat.size() < 6 || flat.size() % 2 != 0)
      throw ConfigError(section + ".vertices: expected a flat x0 y0 x1 y1 ... list");
    std::vector<Point> verts;
    for (size_t i = 0; i < flat.size(); i += 2) verts.emplace_back(flat[i], flat[i + 1]);
    return Domain::polygon(std::move(verts));
  }
  if (kind == "complement") {
    const Domain inner = parse_domain(cfg, section + ".inner", dim);
    const Point lo = point_from_list(cfg.get_list(section + ".bbox_lo"), dim,
                                     section + ".bbox_lo");
    const Point hi = point_from_list(cfg.get_list(section + ".bbox_hi"), dim,
                                     section + ".bbox_hi");
    return Domain::complement_of(inner, lo, hi);
  }
  throw ConfigError(section + ".kind: unknown shape '" + kind + "'");
}

ExperimentConfig ExperimentConfig::parse(const Config& cfg) {
  ExperimentConfig ec;
  ec.name = cfg.get_string("name", "experiment");
  ec.dim = cfg.get_int("dim", 1);
  if (ec.dim != 1 && ec.dim != 2) throw ConfigError("dim must be 1 or 2");

  const std::string mode = cfg.get_string("mode", "trace_sweep");
  if (mode == "trace_sweep") ec.mode = RunMode::TraceSweep;
  else if (mode == "regularized_diff") ec.mode = RunMode::RegularizedDiff;
  else if (mode == "commutator_diag") ec.mode = RunMode::CommutatorDiag;
  else if (mode == "coeff_only") ec.mode = RunMode::CoeffOnly;
  else throw ConfigError("mode: unknown mode '" + mode + "'");

  ec.lambda = parse_domain(cfg, "domain_lambda", ec.dim);
  ec.omega = parse_domain(cfg, "domain_omega", ec.dim);
  if (ec.lambda->dim() != ec.dim || ec.omega->dim() != ec.dim)
    throw ConfigError("domain dimensions do not match dim");
  ec.symbol = parse_symbol(cfg, ec.dim);
  if (cfg.has("g.kind") || cfg.has("g.coeffs")) ec.g = parse_g(cfg);
  ec.symmetrize_op = cfg.get_bool("symmetrize", false);

  if (cfg.has("alphas")) {
    ec.alphas = cfg.get_list("alphas");
  } else if (cfg.has("alpha_min")) {
    // geometric range
    const double a0 = cfg.get_double("alpha_min");
    const double a1 = cfg.get_double("alpha_max");
    const int count = cfg.get_int("alpha_count", 4);
    if (!(a0 > 0 && a1 > a0 && count >= 2))
      throw ConfigError("alpha range: need 0 < alpha_min < alpha_max, count >= 2");
    for (int i = 0; i < count; ++i)
      ec.alphas.push_back(a0 * std::pow(a1 / a0, double(i) / (count - 1)));
  }
  for (size_t i = 0; i + 1 < ec.alphas.size(); ++i)
    if (!(ec.alphas[i] < ec.alphas[i + 1]))
      throw ConfigError("alphas must be strictly increasing");
  if (ec.mode != RunMode::CoeffOnly && ec.alphas.empty())
    throw ConfigError("alphas: required for sweep modes");

  const std::string backend = cfg.get_string("backend", "torus");
  if (backend == "dense") ec.backend = Backend::AnalyticDense;
  else if (backend == "torus") ec.backend = Backend::TorusFFT;
  else throw ConfigError("backend: unknown backend '" + backend + "'");

  ec.res.ppw = cfg.get_double("ppw", 6.0);
  ec.res.pad_factor = cfg.get_double("pad_factor", 3.0);
  ec.res.n_override = cfg.get_int("n_override", 0);
  ec.res.budget_mb = cfg.get_double("budget_mb", 4096.0);
  ec.p_max = cfg.get_int("p_max", 2);
  if (ec.p_max < 1) throw ConfigError("p_max must be >= 1");
  ec.level_volume = cfg.get_int("level_volume", 4);
  ec.level_surface = cfg.get_int("level_surface", 6);
  ec.tolerance = cfg.get_double("tolerance", 0.05);
  ec.window_lo = cfg.get_double("window_lo", 0.0);
  ec.window_hi = cfg.get_double("window_hi", std::numeric_limits<double>::infinity());
  if (cfg.has("expected_w1")) ec.expected_w1 = cfg.get_double("expected_w1");
  ec.seed = static_cast<unsigned long>(cfg.get_double("seed", 1.0));
  ec.out_prefix = cfg.get_string("out_prefix", "whop_out");
  ec.config_hash = cfg.canonical_hash();
  ec.echo = cfg.entries();
  return ec;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace {

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void spectrum_bounds(const DiscreteOperator& op, SweepRecord& rec) {
  if (!op.hermitian_flag || !op.symbol_is_one || op.n_dof() > 3200) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.matrix, Eigen::EigenvaluesOnly);
  rec.spec_min = es.eigenvalues().minCoeff();
  rec.spec_max = es.eigenvalues().maxCoeff();
}

void fill_predicted_terms(SweepRecord& rec, const Prediction& pred, int dim) {
  const double a = rec.alpha;
  rec.pred_w0_term = pred.w0.real() * std::pow(a, dim);
  rec.pred_w1_term = pred.w1.real() * std::pow(a, dim - 1) * std::log(a);
  rec.residual = rec.trace.real() - rec.pred_w0_term - rec.pred_w1_term;
}

bool verdict_fit_matches(double c_log, double predicted, double tol) {
  if (std::abs(predicted) < 1e-12) return std::abs(c_log) <= tol;
  return std::abs(c_log - predicted) <= tol * std::abs(predicted);
}

DiscreteOperator build_operator(const ExperimentConfig& cfg, double alpha) {
  if (cfg.backend == Backend::AnalyticDense)
    return assemble_dense(cfg.symbol, *cfg.lambda, *cfg.omega, alpha, cfg.res);
  const TorusGrid grid = TorusGrid::build(*cfg.lambda, *cfg.omega, alpha, cfg.res,
                                          cfg.symbol.spatial_support_radius());
  return assemble_torus(cfg.symbol, *cfg.lambda, *cfg.omega, alpha, grid);
}

void run_trace_sweep(const ExperimentConfig& cfg, Report& rep) {
  const Prediction pred = predict(cfg.g, cfg.symbol, *cfg.lambda, *cfg.omega,
                                  cfg.symmetrize_op, cfg.level_volume, cfg.level_surface);
  rep.prediction = pred;

  // per-power predictions for the reported rows
  std::vector<Prediction> pred_p;
  for (int p = 1; p <= cfg.p_max; ++p)
    pred_p.push_back(predict(TestFunction::monomial(p), cfg.symbol, *cfg.lambda,
                             *cfg.omega, cfg.symmetrize_op, cfg.level_volume,
                             cfg.level_surface));

  const int g_degree =
      cfg.g.is_polynomial() ? static_cast<int>(cfg.g.coeffs().size()) : 0;

  for (double alpha : cfg.alphas) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      DiscreteOperator op = build_operator(cfg, alpha);
      if (cfg.symmetrize_op) op = symmetrize(op);
      const int need_p = std::max(cfg.p_max, g_degree);
      const auto traces = trace_poly(op, need_p);

      for (int p = 1; p <= cfg.p_max; ++p) {
        SweepRecord rec;
        rec.alpha = alpha;
        rec.curve = "p" + std::to_string(p);
        rec.trace = traces[p - 1];
        rec.backend = to_string(cfg.backend);
        rec.n_dof = op.n_dof();
        rec.seconds = elapsed_s(t0);
        rec.config_hash = cfg.config_hash;
        fill_predicted_terms(rec, pred_p[p - 1], cfg.dim);
        rep.records.push_back(rec);
      }

      SweepRecord rec;
      rec.alpha = alpha;
      rec.curve = "g";
      if (cfg.g.is_polynomial()) {
        Complex v = 0.0;
        for (int p = 1; p <= g_degree; ++p) v += cfg.g.coeffs()[p - 1] * traces[p - 1];
        rec.trace = v;
      } else {
        rec.trace = trace_smooth(op, cfg.g);
      }
      rec.backend = to_string(cfg.backend);
      rec.n_dof = op.n_dof();
      rec.config_hash = cfg.config_hash;
      fill_predicted_terms(rec, pred, cfg.dim);
      spectrum_bounds(op, rec);
      rec.seconds = elapsed_s(t0);
      rep.records.push_back(rec);
    } catch (const std::exception& e) {
      SweepRecord rec;
      rec.alpha = alpha;
      rec.curve = "g";
      rec.backend = to_string(cfg.backend);
      rec.config_hash = cfg.config_hash;
      rec.seconds = elapsed_s(t0);
      rec.error = e.what();
      rep.records.push_back(rec);
    }
  }

  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rep.records)
    if (r.ok() && r.curve == "g") pts.emplace_back(r.alpha, r.trace.real());
  try {
    rep.fit = fit_log_coefficient(pts, pred.w0.real(), cfg.dim, cfg.window_lo,
                                  cfg.window_hi);
    const bool ok = verdict_fit_matches(rep.fit->c_log, pred.w1.real(), cfg.tolerance);
    rep.verdicts.emplace_back("fitted_c_log_matches_w1", ok);
  } catch (const std::exception& e) {
    rep.verdicts.emplace_back(std::string("fit_failed: ") + e.what(), false);
  }
}

void run_regularized_diff(const ExperimentConfig& cfg, Report& rep) {
  const TestFunction gp = TestFunction::monomial(cfg.p_max);
  Prediction pred = predict(gp, cfg.symbol, *cfg.lambda, *cfg.omega, cfg.symmetrize_op,
                            cfg.level_volume, cfg.level_surface);
  pred.w0 = 0.0;  // the regularized difference has no Weyl term
  rep.prediction = pred;

  for (double alpha : cfg.alphas) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.alpha = alpha;
    rec.curve = "regdiff_p" + std::to_string(cfg.p_max);
    rec.backend = "torus";
    rec.config_hash = cfg.config_hash;
    try {
      const TorusGrid grid = TorusGrid::build(*cfg.lambda, *cfg.omega, alpha, cfg.res,
                                              cfg.symbol.spatial_support_radius());
      rec.trace = regularized_trace_diff(cfg.symbol, *cfg.lambda, *cfg.omega, alpha,
                                         cfg.p_max, grid);
      rec.n_dof = grid.total_points();
      fill_predicted_terms(rec, pred, cfg.dim);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.seconds = elapsed_s(t0);
    rep.records.push_back(rec);
  }

  if (cfg.p_max == 1) {
    bool zeros = true;
    for (const auto& r : rep.records)
      if (r.ok() && std::abs(r.trace) != 0.0) zeros = false;
    rep.verdicts.emplace_back("p1_difference_exactly_zero", zeros);
    return;
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rep.records)
    if (r.ok()) pts.emplace_back(r.alpha, r.trace.real());
  try {
    rep.fit =
        fit_log_coefficient(pts, 0.0, cfg.dim, cfg.window_lo, cfg.window_hi);
    const bool ok = verdict_fit_matches(rep.fit->c_log, pred.w1.real(), cfg.tolerance);
    rep.verdicts.emplace_back("fitted_c_log_matches_w1", ok);
  } catch (const std::exception& e) {
    rep.verdicts.emplace_back(std::string("fit_failed: ") + e.what(), false);
  }
}

void run_commutator_diag(const ExperimentConfig& cfg, Report& rep) {
  for (double alpha : cfg.alphas) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto rows =
          commutator_growth(cfg.symbol, *cfg.lambda, *cfg.omega, {alpha}, cfg.res);
      for (const auto& row : rows) {
        rep.commutator_rows.push_back(row);
        for (const char* which : {"comm_chi", "comm_proj"}) {
          SweepRecord rec;
          rec.alpha = alpha;
          rec.curve = which;
          rec.trace = std::string(which) == "comm_chi" ? row.norm_chi : row.norm_proj;
          rec.backend = "torus";
          rec.n_dof = row.n_dof;
          rec.seconds = elapsed_s(t0);
          rec.config_hash = cfg.config_hash;
          rep.records.push_back(rec);
        }
      }
    } catch (const std::exception& e) {
      SweepRecord rec;
      rec.alpha = alpha;
      rec.curve = "comm_chi";
      rec.backend = "torus";
      rec.config_hash = cfg.config_hash;
      rec.seconds = elapsed_s(t0);
      rec.error = e.what();
      rep.records.push_back(rec);
    }
  }
  auto ratio_spread = [&](bool chi) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& row : rep.commutator_rows) {
      const double r = chi ? row.ratio_chi : row.ratio_proj;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return hi / lo;
  };
  if (!rep.commutator_rows.empty()) {
    rep.verdicts.emplace_back("chi_ratio_within_factor_2", ratio_spread(true) < 2.0);
    rep.verdicts.emplace_back("proj_ratio_within_factor_2", ratio_spread(false) < 2.0);
  } else {
    rep.verdicts.emplace_back("commutator_rows_present", false);
  }
}

void run_coeff_only(const ExperimentConfig& cfg, Report& rep) {
  rep.prediction = predict(cfg.g, cfg.symbol, *cfg.lambda, *cfg.omega, cfg.symmetrize_op,
                           cfg.level_volume, cfg.level_surface);
  auto one = [](const Point&, const Point&) { return Complex(1.0); };
  rep.w0_geometry = coeff_W0(one, *cfg.lambda, *cfg.omega, cfg.level_volume);
  rep.w1_geometry = coeff_W1(one, cfg.lambda->boundary_patches(),
                             cfg.omega->boundary_patches(), cfg.level_surface, cfg.dim);
  if (cfg.expected_w1) {
    const double got = rep.w1_geometry->real();
    rep.verdicts.emplace_back("w1_geometry_matches_expected",
                              std::abs(got - *cfg.expected_w1) <= 1e-6);
  }
}

}  // namespace

Report run(const ExperimentConfig& cfg) {
  if ((cfg.mode == RunMode::TraceSweep || cfg.mode == RunMode::RegularizedDiff) &&
      cfg.alphas.size() < 3)
    throw ConfigError("alphas: fit modes need >= 3 entries");
  Report rep;
  rep.name = cfg.name;
  rep.mode = to_string(cfg.mode);
  rep.dim = cfg.dim;
  rep.config_hash = cfg.config_hash;
  rep.config_echo = cfg.echo;
  switch (cfg.mode) {
    case RunMode::TraceSweep: run_trace_sweep(cfg, rep); break;
    case RunMode::RegularizedDiff: run_regularized_diff(cfg, rep); break;
    case RunMode::CommutatorDiag: run_commutator_diag(cfg, rep); break;
    case RunMode::CoeffOnly: run_coeff_only(cfg, rep); break;
  }
  rep.pass = true;
  for (const auto& [name, ok] : rep.verdicts) rep.pass = rep.pass && ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json record_to_json(const SweepRecord& r) {
  json j;
  j["alpha"] = r.alpha;
  j["p_or_g"] = r.curve;
  if (r.ok()) {
    j["trace_re"] = r.trace.real();
    j["trace_im"] = r.trace.imag();
    j["pred_w0_term"] = r.pred_w0_term;
    j["pred_w1_term"] = r.pred_w1_term;
    j["residual"] = r.residual;
  } else {
    j["error"] = r.error;
  }
  j["backend"] = r.backend;
  j["N_dof"] = r.n_dof;
  j["seconds"] = r.seconds;
  j["config_hash"] = r.config_hash;
  if (r.spec_min) j["spec_min"] = *r.spec_min;
  if (r.spec_max) j["spec_max"] = *r.spec_max;
  return j;
}

}  // namespace

std::vector<std::string> emit(const Report& report, EmitFormat format,
                              const std::string& prefix) {
  std::vector<std::string> written;
  const auto parent = std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);

  if (format == EmitFormat::Csv) {
    const std::string path = prefix + ".csv";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("emit: cannot write " + path);
    f << "alpha,p_or_g,trace_re,trace_im,pred_w0_term,pred_w1_term,residual,backend,"
         "N_dof,seconds\n";
    for (const auto& r : report.records) {
      if (!r.ok()) continue;
      f << fmt_double(r.alpha) << ',' << csv_quote(r.curve) << ','
        << fmt_double(r.trace.real()) << ',' << fmt_double(r.trace.imag()) << ','
        << fmt_double(r.pred_w0_term) << ',' << fmt_double(r.pred_w1_term) << ','
        << fmt_double(r.residual) << ',' << csv_quote(r.backend) << ',' << r.n_dof << ','
        << fmt_double(r.seconds) << '\n';
    }
    written.push_back(path);
    return written;
  }

  if (format == EmitFormat::Json) {
    const std::string path = prefix + ".json";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("emit: cannot write " + path);
    f << report_json(report) << '\n';
    written.push_back(path);
    return written;
  }

  // PlotData: per-curve normalized remainder (trace - w0 a^d) / (a^{d-1} log a).
  std::set<std::string> curves;
  for (const auto& r : report.records)
    if (r.ok()) curves.insert(r.curve);
  std::vector<std::string> dat_files;
  for (const auto& curve : curves) {
    const std::string path = prefix + "_" + curve + ".dat";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("emit: cannot write " + path);
    f << "# alpha  (trace - w0*alpha^d)/(alpha^(d-1) log alpha)\n";
    for (const auto& r : report.records) {
      if (!r.ok() || r.curve != curve) continue;
      const double denom = std::pow(r.alpha, report.dim - 1) * std::log(r.alpha);
      f << fmt_double(r.alpha) << ' '
        << fmt_double((r.trace.real() - r.pred_w0_term) / denom) << '\n';
    }
    written.push_back(path);
    dat_files.push_back(path);
  }
  const std::string gp = prefix + ".gp";
  std::ofstream f(gp);
  f << "# gnuplot script: normalized remainders; flat curves indicate the\n"
    << "# fitted log coefficient\n"
    << "set xlabel 'alpha'\nset ylabel 'normalized remainder'\nset logscale x\n"
    << "plot ";
  for (size_t i = 0; i < dat_files.size(); ++i) {
    f << "'" << dat_files[i] << "' using 1:2 with linespoints";
    if (i + 1 < dat_files.size()) f << ", ";
  }
  f << "\n";
  written.push_back(gp);
  return written;
}

std::string report_json(const Report& report) {
  json j;
  j["name"] = report.name;
  j["mode"] = report.mode;
  j["dim"] = report.dim;
  char hash_buf[24];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(report.config_hash));
  j["config_hash"] = hash_buf;
  j["config"] = report.config_echo;
  if (report.prediction) {
    const auto& p = *report.prediction;
    j["prediction"] = {{"w0_re", p.w0.real()},       {"w0_im", p.w0.imag()},
                       {"w1_re", p.w1.real()},       {"w1_im", p.w1.imag()},
                       {"level_volume", p.level_volume},
                       {"level_surface", p.level_surface},
                       {"symmetrized", p.symmetrized}};
  }
  if (report.w0_geometry) {
    j["w0_geometry_re"] = report.w0_geometry->real();
    j["w1_geometry_re"] = report.w1_geometry->real();
  }
  if (report.fit) {
    const auto& fit = *report.fit;
    json jf = {{"c_log", fit.c_log},           {"c_plain", fit.c_plain},
               {"residual", fit.residual_norm}, {"condition", fit.condition},
               {"window", {fit.window_lo, fit.window_hi}},
               {"n_used", fit.n_used}};
    if (fit.w0_fitted) jf["w0_fitted"] = *fit.w0_fitted;
    j["fit"] = jf;
  }
  j["records"] = json::array();
  for (const auto& r : report.records) j["records"].push_back(record_to_json(r));
  if (!report.commutator_rows.empty()) {
    j["commutator"] = json::array();
    for (const auto& row : report.commutator_rows)
      j["commutator"].push_back({{"alpha", row.alpha},
                                 {"norm_chi", row.norm_chi},
                                 {"norm_proj", row.norm_proj},
                                 {"ratio_chi", row.ratio_chi},
                                 {"ratio_proj", row.ratio_proj},
                                 {"alpha_ell_rho", row.alpha_ell_rho},
                                 {"N_dof", row.n_dof}});
  }
  j["verdicts"] = json::array();
  for (const auto& [name, ok] : report.verdicts)
    j["verdicts"].push_back({{"name", name}, {"pass", ok}});
  j["pass"] = report.pass;
  return j.dump(2);
}

std::string resolve_config_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  auto try_path = [](const fs::path& p) -> std::optional<std::string> {
    if (fs::exists(p) && fs::is_regular_file(p)) return p.string();
    return std::nullopt;
  };
  if (auto p = try_path(name_or_path)) return *p;
  if (auto p = try_path(name_or_path + ".cfg")) return *p;
  if (const char* env = std::getenv("WHOP_PRESET_DIR")) {
    if (auto p = try_path(fs::path(env) / name_or_path)) return *p;
    if (auto p = try_path(fs::path(env) / (name_or_path + ".cfg"))) return *p;
  }
#ifdef WHOP_PRESET_DIR
  if (auto p = try_path(fs::path(WHOP_PRESET_DIR) / name_or_path)) return *p;
  if (auto p = try_path(fs::path(WHOP_PRESET_DIR) / (name_or_path + ".cfg"))) return *p;
#endif
  throw ConfigError("config not found: " + name_or_path);
}

std::vector<BackendComparison> compare_backends(const ExperimentConfig& cfg) {
  std::vector<BackendComparison> out;
  for (double alpha : cfg.alphas) {
    const DiscreteOperator dense =
        assemble_dense(cfg.symbol, *cfg.lambda, *cfg.omega, alpha, cfg.res);
    const TorusGrid grid = TorusGrid::build(*cfg.lambda, *cfg.omega, alpha, cfg.res,
                                            cfg.symbol.spatial_support_radius());
    const DiscreteOperator torus =
        assemble_torus(cfg.symbol, *cfg.lambda, *cfg.omega, alpha, grid);
    const auto td = trace_poly(dense, cfg.p_max);
    const auto tt = trace_poly(torus, cfg.p_max);
    BackendComparison cmp;
    cmp.alpha = alpha;
    cmp.n_dense = dense.n_dof();
    cmp.n_torus = torus.n_dof();
    for (int p = 0; p < cfg.p_max; ++p) {
      const double rel = std::abs(td[p] - tt[p]) / std::abs(td[p]);
      cmp.rel_discrepancy.push_back(rel);
      cmp.max_rel = std::max(cmp.max_rel, rel);
    }
    out.push_back(cmp);
  }
  return out;
}

}  // namespace whop
