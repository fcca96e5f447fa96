#include "whop/harness.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace whop;

namespace {
constexpr double kPi = std::numbers::pi;

const char* kTinySweep = R"(
name = tiny_sweep
mode = trace_sweep
dim = 1
alphas = 8 12 16 24
backend = torus
p_max = 2
tolerance = 0.9

[domain_lambda]
kind = interval
lo = 0
hi = 1

[domain_omega]
kind = interval
lo = -1
hi = 1

[symbol]
kind = constant
value = 1

[g]
kind = poly
coeffs = 1 -1
)";

std::string temp_prefix(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

}  // namespace

TEST_CASE("config parsing") {
  const Config cfg = Config::from_string(
      "a = 1.5\n# comment\n[sec]\nlist = 1, 2 ,3\nflag = true\nname = hello\n");
  CHECK(cfg.get_double("a") == 1.5);
  CHECK(cfg.get_list("sec.list") == std::vector<double>{1, 2, 3});
  CHECK(cfg.get_bool("sec.flag", false));
  CHECK(cfg.get_string("sec.name") == "hello");
  CHECK(cfg.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(cfg.get_double("sec.name"), ConfigError);
  CHECK_THROWS_AS(Config::from_string("novalue\n"), ConfigError);
}

TEST_CASE("config hash semantics") {
  const Config a = Config::from_string("x = 1.0\n[s]\ny = 2 3\n");
  const Config b = Config::from_string("# note\nx   =   1.00000\n[s]\n y = 2,3\n");
  const Config c = Config::from_string("x = 1.0\n[s]\ny = 2 4\n");
  CHECK(a.canonical_hash() == b.canonical_hash());
  CHECK(a.canonical_hash() != c.canonical_hash());
}

TEST_CASE("experiment parsing") {
  const ExperimentConfig ec = ExperimentConfig::parse(Config::from_string(kTinySweep));
  CHECK(ec.name == "tiny_sweep");
  CHECK(ec.dim == 1);
  CHECK(ec.alphas.size() == 4);
  CHECK(ec.backend == Backend::TorusFFT);
  CHECK(ec.lambda->kind() == ShapeKind::Interval);
  CHECK(ec.g.is_polynomial());

  // complement domain record
  const Config comp = Config::from_string(R"(
dim = 2
mode = coeff_only
[domain_lambda]
kind = complement
bbox_lo = -3 -3
bbox_hi = 3 3
[domain_lambda.inner]
kind = box
lo = -0.5 -0.5
hi = 0.5 0.5
[domain_omega]
kind = ball
center = 0 0
radius = 1
)");
  const ExperimentConfig ec2 = ExperimentConfig::parse(comp);
  CHECK(ec2.lambda->is_complement());
  CHECK(ec2.omega->kind() == ShapeKind::Ball);

  CHECK_THROWS_AS(ExperimentConfig::parse(Config::from_string("mode = bogus\n")),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse(Config::from_string(
                      "dim = 1\nalphas = 4 2\nmode = coeff_only\n")),
                  ConfigError);
}

TEST_CASE("coeff_only run") {
  const Config cfg = Config::from_string(R"(
name = squares_coeffs
mode = coeff_only
dim = 2
level_surface = 5
[domain_lambda]
kind = box
lo = 0 0
hi = 1 1
[domain_omega]
kind = box
lo = -0.5 -0.5
hi = 0.5 0.5
[g]
kind = poly
coeffs = 0 1
)");
  const Report rep = run(ExperimentConfig::parse(cfg));
  REQUIRE(rep.w1_geometry.has_value());
  CHECK(rep.w1_geometry->real() == doctest::Approx(4.0 / kPi).epsilon(1e-6));
  CHECK(rep.prediction->w1.real() ==
        doctest::Approx(-1.0 / (kPi * kPi * kPi)).epsilon(1e-9));
  CHECK(rep.records.empty());
  CHECK(rep.pass);
}

TEST_CASE("trace sweep run and emission") {
  const ExperimentConfig ec = ExperimentConfig::parse(Config::from_string(kTinySweep));
  const Report rep = run(ec);
  REQUIRE(rep.fit.has_value());
  CHECK(rep.records.size() == 4 * 3);  // p1, p2, g per alpha
  for (const auto& r : rep.records) CHECK(r.ok());

  const std::string prefix = temp_prefix("whop_harness_test");
  const auto csv_files = emit(rep, EmitFormat::Csv, prefix);
  const auto json_files = emit(rep, EmitFormat::Json, prefix);
  const auto plot_files = emit(rep, EmitFormat::PlotData, prefix);
  REQUIRE(csv_files.size() == 1);
  REQUIRE(json_files.size() == 1);
  CHECK(plot_files.size() >= 2);

  std::ifstream csv(csv_files[0]);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "alpha,p_or_g,trace_re,trace_im,pred_w0_term,pred_w1_term,residual,backend,N_dof,"
        "seconds");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 12);

  // JSON round trip reproduces numeric fields bit-exactly
  std::ifstream jf(json_files[0]);
  nlohmann::json j;
  jf >> j;
  CHECK(j["records"].size() == 12);
  for (size_t i = 0; i < rep.records.size(); ++i) {
    const double re = j["records"][i]["trace_re"].get<double>();
    CHECK(re == rep.records[i].trace.real());
  }
  CHECK(j["fit"]["c_log"].get<double>() == rep.fit->c_log);
  CHECK(j["pass"].is_boolean());

  for (const auto& f : csv_files) std::filesystem::remove(f);
  for (const auto& f : json_files) std::filesystem::remove(f);
  for (const auto& f : plot_files) std::filesystem::remove(f);
}

TEST_CASE("empty sweep emits header only") {
  Report rep;
  rep.name = "empty";
  const std::string prefix = temp_prefix("whop_empty_test");
  const auto files = emit(rep, EmitFormat::Csv, prefix);
  std::ifstream csv(files[0]);
  std::string header, rest;
  std::getline(csv, header);
  CHECK(header.substr(0, 5) == "alpha");
  CHECK_FALSE(std::getline(csv, rest));
  std::filesystem::remove(files[0]);
}

TEST_CASE("regularized diff mode p=1 is exact zero") {
  const Config cfg = Config::from_string(R"(
name = regdiff_p1
mode = regularized_diff
dim = 1
alphas = 8 12 16
backend = torus
p_max = 1
[domain_lambda]
kind = interval
lo = 0
hi = 1
[domain_omega]
kind = interval
lo = -1
hi = 1
[symbol]
kind = constant
value = 1
)");
  const Report rep = run(ExperimentConfig::parse(cfg));
  for (const auto& r : rep.records) {
    REQUIRE(r.ok());
    CHECK(std::abs(r.trace) == 0.0);
  }
  CHECK(rep.pass);
}

TEST_CASE("guard failures become error records, not crashes") {
  ExperimentConfig ec = ExperimentConfig::parse(Config::from_string(kTinySweep));
  ec.res.budget_mb = 1e-5;  // every alpha hits the memory guard
  const Report rep = run(ec);
  bool any_error = false;
  for (const auto& r : rep.records) any_error = any_error || !r.ok();
  CHECK(any_error);
  CHECK_FALSE(rep.pass);  // fit cannot run
}

TEST_CASE("zero tolerance never passes") {
  ExperimentConfig ec = ExperimentConfig::parse(Config::from_string(kTinySweep));
  ec.tolerance = 0.0;
  const Report rep = run(ec);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("preset configs resolve and parse") {
  for (const char* name : {"landau_widom_1d", "squares_2d_p2", "disks_2d_p2",
                           "complement_box_regularized", "commutator_growth"}) {
    const std::string path = resolve_config_path(name);
    const ExperimentConfig ec = ExperimentConfig::parse(Config::from_file(path));
    CHECK_FALSE(ec.name.empty());
  }
  CHECK_THROWS_AS(resolve_config_path("no_such_preset"), ConfigError);
}

TEST_CASE("determinism: identical configs give identical reports") {
  const ExperimentConfig ec = ExperimentConfig::parse(Config::from_string(kTinySweep));
  const Report a = run(ec);
  const Report b = run(ec);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i)
    CHECK(a.records[i].trace == b.records[i].trace);
  CHECK(a.fit->c_log == b.fit->c_log);
}
