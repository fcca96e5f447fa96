#pragma once

#include "whop/asymptotics.hpp"
#include "whop/config.hpp"
#include "whop/operators.hpp"
#include "whop/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace whop {

enum class RunMode { TraceSweep, RegularizedDiff, CommutatorDiag, CoeffOnly };

std::string to_string(RunMode mode);
std::string to_string(Backend backend);

/// Parsed experiment description. Declarative: every acceptance run is
/// reproducible from a config file alone.
struct ExperimentConfig {
  std::string name = "experiment";
  int dim = 1;
  std::optional<Domain> lambda, omega;
  Symbol symbol = Symbol::constant(1.0);
  TestFunction g = TestFunction::monomial(1);
  bool symmetrize_op = false;
  std::vector<double> alphas;
  Backend backend = Backend::TorusFFT;
  Resolution res;
  int p_max = 2;
  RunMode mode = RunMode::TraceSweep;
  int level_volume = 4;
  int level_surface = 6;
  double tolerance = 0.05;
  double window_lo = 0.0;
  double window_hi = std::numeric_limits<double>::infinity();
  std::optional<double> expected_w1;  // optional external oracle for coeff runs
  unsigned long seed = 1;
  std::string out_prefix = "whop_out";
  std::uint64_t config_hash = 0;
  std::map<std::string, std::string> echo;  // raw config entries

  static ExperimentConfig parse(const Config& cfg);
  static Domain parse_domain(const Config& cfg, const std::string& section, int dim);
};

/// One (alpha, curve) measurement.
struct SweepRecord {
  double alpha = 0.0;
  std::string curve;  // "p1", "p2", ..., "g", "regdiff", "comm_chi", "comm_proj"
  Complex trace = 0.0;
  double pred_w0_term = 0.0;  // Re w0 * alpha^d
  double pred_w1_term = 0.0;  // Re w1 * alpha^{d-1} log alpha
  double residual = 0.0;
  std::string backend;
  long n_dof = 0;
  double seconds = 0.0;
  std::uint64_t config_hash = 0;
  std::optional<double> spec_min, spec_max;  // torus a==1 spectrum check
  std::string error;  // nonempty when this alpha was aborted by a guard

  bool ok() const { return error.empty(); }
};

struct Report {
  std::string name;
  std::string mode;
  int dim = 1;
  std::uint64_t config_hash = 0;
  std::map<std::string, std::string> config_echo;
  std::vector<SweepRecord> records;
  std::optional<Prediction> prediction;
  std::optional<Complex> w0_geometry, w1_geometry;  // coefficient runs
  std::optional<FitResult> fit;
  std::vector<CommutatorRow> commutator_rows;
  std::vector<std::pair<std::string, bool>> verdicts;
  bool pass = true;
};

Report run(const ExperimentConfig& cfg);

enum class EmitFormat { Csv, Json, PlotData };

/// Writes report files under `prefix` (prefix.csv / prefix.json /
/// prefix_<curve>.dat + prefix.gp). Returns the paths written.
std::vector<std::string> emit(const Report& report, EmitFormat format,
                              const std::string& prefix);

/// JSON mirror of the full report as a string (the same payload emit writes).
std::string report_json(const Report& report);

/// Resolve a config argument: a literal path, $WHOP_PRESET_DIR/<name>.cfg, or
/// the bundled preset directory.
std::string resolve_config_path(const std::string& name_or_path);

/// Cross-backend comparison: max over p of the relative trace discrepancy.
struct BackendComparison {
  double alpha = 0.0;
  std::vector<double> rel_discrepancy;  // per p = 1..p_max
  double max_rel = 0.0;
  long n_dense = 0, n_torus = 0;
};
std::vector<BackendComparison> compare_backends(const ExperimentConfig& cfg);

}  // namespace whop
