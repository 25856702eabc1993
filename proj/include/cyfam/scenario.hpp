#pragma once

// End-to-end scenario: build, normalize, curvature, Green bound, assembly and
// verification for each base point of a family, with a JSON report.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyfam/assembler.hpp"
#include "cyfam/green.hpp"

namespace cyfam {

struct CustomFamily {
  std::string name = "custom";
  double radius = 0.5;
  std::vector<CMat> coefficients;
  bool operator==(const CustomFamily&) const = default;
};

struct ScenarioConfig {
  std::string family = "elliptic";
  std::optional<CustomFamily> custom;
  int grid = 0;  // 0 selects 32 for n = 1 and 16 otherwise
  double step = 1e-2;
  std::vector<cplx> base;  // absolute base parameters
  std::vector<cplx> at;    // period values tau (n = 1), solved for s
  Provenance mode = Provenance::closed_form;
  PerturbationSpec psi;    // empty selects PerturbationSpec::standard(n)
  std::vector<std::pair<std::string, double>> tolerances;  // overrides
  Breakage breakage;
  double break_normalization = 0.0;
  int green_samples = 9;   // base samples per direction for the family bound
  double green_tol = 1e-6;
  std::uint64_t seed = 1;
  std::string out;
  bool verbose = false;

  bool operator==(const ScenarioConfig& o) const;
};

using ToleranceTable = std::vector<std::pair<std::string, double>>;

/// Residual names in report order with their default tolerances.
ToleranceTable default_tolerances(Provenance mode);
/// Defaults with the configured overrides applied.
ToleranceTable effective_tolerances(const ScenarioConfig& cfg);
/// Parses "name=value"; throws ConfigError for unknown names or nonpositive values.
void set_tolerance(ScenarioConfig& cfg, const std::string& assignment);

/// Throws ConfigError on malformed input, unknown keys or invalid values.
ScenarioConfig parse_config(const std::string& toml_text);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Annotated TOML of the default configuration; parses back to ScenarioConfig{}.
std::string dump_config_schema();
std::string list_presets();

PeriodFamily resolve_family(const ScenarioConfig& cfg);
std::vector<cplx> resolve_base_points(const ScenarioConfig& cfg, const PeriodFamily& fam);
int resolve_grid(const ScenarioConfig& cfg, int n);

struct BasePointResult {
  cplx s{0.0, 0.0};
  CMat omega;
  double wp = 0.0;
  std::optional<double> wp_closed;
  double theta_ss = 0.0;
  std::optional<double> theta_analytic;
  int ma_iterations = 0;
  std::vector<Residual> residuals;
  GlobalFormReport global;
  bool pass = false;
  std::string failed_stage;
  std::string error;
};

struct ScenarioResult {
  int exit_code = 1;
  double c = 0.0;
  std::vector<double> c_samples;
  std::vector<BasePointResult> points;
  std::vector<std::string> failures;
  std::string report_json;
};

/// Runs the pipeline; writes report.json and grids/ under cfg.out when set.
/// Throws ConfigError for invalid configurations.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

}  // namespace cyfam
