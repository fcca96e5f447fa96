// Command line front end: declarative experiment runner for Wiener-Hopf
// trace asymptotics. Exit codes: 0 pass, 1 verdict failure, 2 config error.

#include "whop/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>

namespace {

whop::ExperimentConfig load(const std::string& arg) {
  const std::string path = whop::resolve_config_path(arg);
  whop::ExperimentConfig cfg =
      whop::ExperimentConfig::parse(whop::Config::from_file(path));
  // WHOP_SCRATCH_DIR redirects relative output prefixes
  if (const char* scratch = std::getenv("WHOP_SCRATCH_DIR")) {
    if (!cfg.out_prefix.empty() && cfg.out_prefix.front() != '/')
      cfg.out_prefix = std::string(scratch) + "/" + cfg.out_prefix;
  }
  return cfg;
}

void print_verdicts(const whop::Report& rep) {
  for (const auto& [name, ok] : rep.verdicts)
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
}

int cmd_run(const std::string& cfg_arg, const std::string& out_override, bool plotdata) {
  whop::ExperimentConfig cfg = load(cfg_arg);
  if (!out_override.empty()) cfg.out_prefix = out_override;
  const whop::Report rep = whop::run(cfg);
  auto files = whop::emit(rep, whop::EmitFormat::Csv, cfg.out_prefix);
  auto jfiles = whop::emit(rep, whop::EmitFormat::Json, cfg.out_prefix);
  files.insert(files.end(), jfiles.begin(), jfiles.end());
  if (plotdata) {
    auto pfiles = whop::emit(rep, whop::EmitFormat::PlotData, cfg.out_prefix);
    files.insert(files.end(), pfiles.begin(), pfiles.end());
  }
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  if (rep.prediction)
    std::printf("prediction: w0 = %.12g, w1 = %.12g\n", rep.prediction->w0.real(),
                rep.prediction->w1.real());
  if (rep.fit)
    std::printf("fit: c_log = %.12g, c_plain = %.12g (condition %.3g, n = %d)\n",
                rep.fit->c_log, rep.fit->c_plain, rep.fit->condition, rep.fit->n_used);
  print_verdicts(rep);
  return rep.pass ? 0 : 1;
}

int cmd_coeffs(const std::string& cfg_arg) {
  whop::ExperimentConfig cfg = load(cfg_arg);
  cfg.mode = whop::RunMode::CoeffOnly;
  const whop::Report rep = whop::run(cfg);
  std::printf("w0          = %.12g\n", rep.prediction->w0.real());
  std::printf("w1          = %.12g\n", rep.prediction->w1.real());
  std::printf("w0_geometry = %.12g\n", rep.w0_geometry->real());
  std::printf("w1_geometry = %.12g\n", rep.w1_geometry->real());
  print_verdicts(rep);
  return rep.pass ? 0 : 1;
}

int cmd_validate(const std::string& cfg_arg) {
  const whop::ExperimentConfig cfg = load(cfg_arg);
  std::printf("name: %s  mode: %s  backend: %s  dim: %d\n", cfg.name.c_str(),
              whop::to_string(cfg.mode).c_str(), whop::to_string(cfg.backend).c_str(),
              cfg.dim);
  if (cfg.mode == whop::RunMode::CoeffOnly) {
    std::printf("coefficient-only run: no grids to resolve\n");
    return 0;
  }
  for (double alpha : cfg.alphas) {
    if (cfg.backend == whop::Backend::TorusFFT) {
      const whop::TorusGrid grid =
          whop::TorusGrid::build(*cfg.lambda, *cfg.omega, alpha, cfg.res,
                                 cfg.symbol.spatial_support_radius());
      long n_lam = 0;
      for (long i = 0; i < grid.total_points(); ++i)
        if (cfg.lambda->contains(grid.node(i))) ++n_lam;
      const double mb = 16.0 * double(n_lam) * double(n_lam) / (1024.0 * 1024.0);
      std::printf("alpha %-8g N = %d", alpha, grid.n[0]);
      if (cfg.dim == 2) std::printf(" x %d", grid.n[1]);
      std::printf("  L = %.4g  n_dof = %ld  est %.1f MB  freq-count err %.2e\n",
                  grid.box_len[0], n_lam, mb, grid.freq_count_rel_error);
      if (mb > cfg.res.budget_mb) {
        std::printf("violated guard: memory budget (%.1f MB > %.1f MB)\n", mb,
                    cfg.res.budget_mb);
        return 2;
      }
    } else {
      const whop::QuadRule mesh =
          whop::dense_mesh(*cfg.lambda, *cfg.omega, alpha, cfg.res);
      const long n = static_cast<long>(mesh.nodes.size());
      const double mb = 16.0 * double(n) * double(n) / (1024.0 * 1024.0);
      std::printf("alpha %-8g n_dof = %ld  est %.1f MB\n", alpha, n, mb);
      if (mb > cfg.res.budget_mb) {
        std::printf("violated guard: memory budget (%.1f MB > %.1f MB)\n", mb,
                    cfg.res.budget_mb);
        return 2;
      }
    }
  }
  std::printf("all guards satisfied\n");
  return 0;
}

int cmd_compare(const std::string& cfg_arg, double tolerance) {
  whop::ExperimentConfig cfg = load(cfg_arg);
  const auto rows = whop::compare_backends(cfg);
  double worst = 0.0;
  for (const auto& row : rows) {
    std::printf("alpha %-8g dense n=%ld torus n=%ld  max rel discrepancy %.3e\n",
                row.alpha, row.n_dense, row.n_torus, row.max_rel);
    worst = std::max(worst, row.max_rel);
  }
  const double tol = tolerance > 0 ? tolerance : cfg.tolerance;
  std::printf("worst discrepancy %.3e (tolerance %g)\n", worst, tol);
  return worst < tol ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  // WHOP_THREADS caps internal linear-algebra parallelism; the sweep itself
  // is sequential so reports are bit-reproducible.
  if (const char* threads = std::getenv("WHOP_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  CLI::App app{"Wiener-Hopf trace asymptotics laboratory"};
  app.require_subcommand(1);

  std::string cfg_arg, out_override;
  bool plotdata = false;
  double tolerance = 0.0;

  auto* run = app.add_subcommand("run", "run an experiment config and emit reports");
  run->add_option("config", cfg_arg, "config file or preset name")->required();
  run->add_option("--out", out_override, "output path prefix");
  run->add_flag("--plotdata", plotdata, "also emit plot data files");

  auto* coeffs = app.add_subcommand("coeffs", "compute asymptotic coefficients only");
  coeffs->add_option("config", cfg_arg, "config file or preset name")->required();

  auto* validate =
      app.add_subcommand("validate", "resolve grids and budgets without computing");
  validate->add_option("config", cfg_arg, "config file or preset name")->required();

  auto* compare = app.add_subcommand("backends-compare",
                                     "run both backends and report trace discrepancy");
  compare->add_option("config", cfg_arg, "config file or preset name")->required();
  compare->add_option("--tolerance", tolerance, "override comparison tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(cfg_arg, out_override, plotdata);
    if (coeffs->parsed()) return cmd_coeffs(cfg_arg);
    if (validate->parsed()) return cmd_validate(cfg_arg);
    if (compare->parsed()) return cmd_compare(cfg_arg, tolerance);
  } catch (const whop::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const whop::GuardError& e) {
    std::fprintf(stderr, "guard violation: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
