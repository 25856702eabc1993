// cyfam command line: scenario runner plus a few standalone probes.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "cyfam/curvature.hpp"
#include "cyfam/error.hpp"
#include "cyfam/green.hpp"
#include "cyfam/io.hpp"
#include "cyfam/monge_ampere.hpp"
#include "cyfam/scenario.hpp"

using namespace cyfam;

namespace {

struct CommonArgs {
  std::string config;
  std::string family;
  int grid = -1;
  double step = -1.0;
  std::vector<std::string> tols;
  std::string out;
  std::int64_t seed = -1;
  std::vector<std::string> at;
  std::vector<std::string> base;
  std::string mode;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("family", a.family, "preset name (overrides the config file)");
  sub->add_option("--config", a.config, "TOML scenario file");
  sub->add_option("--grid", a.grid, "points per real fiber dimension");
  sub->add_option("--step", a.step, "base stencil step h");
  sub->add_option("--tol", a.tols, "override a verifier tolerance, name=value")->take_all();
  sub->add_option("--out", a.out, "output directory");
  sub->add_option("--seed", a.seed, "seed for randomized probes");
  sub->add_option("--at", a.at, "fiber period tau (n = 1); solved for s");
  sub->add_option("--base", a.base, "base parameter s");
  sub->add_option("--mode", a.mode, "closed-form | perturbed");
}

ScenarioConfig build_config(const CommonArgs& a) {
  ScenarioConfig cfg = a.config.empty() ? ScenarioConfig{} : load_config(a.config);
  if (!a.family.empty()) {
    cfg.family = a.family;
    cfg.custom.reset();
  }
  if (!a.mode.empty()) {
    if (a.mode == "closed-form")
      cfg.mode = Provenance::closed_form;
    else if (a.mode == "perturbed")
      cfg.mode = Provenance::solver_corrected;
    else
      throw ConfigError("mode must be closed-form or perturbed");
  }
  if (a.grid >= 0) {
    if (a.grid < 8 || a.grid % 2) throw ConfigError("grid must be even and at least 8");
    cfg.grid = a.grid;
  }
  if (a.step >= 0.0) {
    if (a.step == 0.0) throw ConfigError("step must be positive");
    cfg.step = a.step;
  }
  for (const auto& t : a.tols) set_tolerance(cfg, t);
  if (!a.out.empty()) cfg.out = a.out;
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  if (!a.at.empty()) {
    cfg.at.clear();
    for (const auto& s : a.at) cfg.at.push_back(parse_complex(s));
  }
  if (!a.base.empty()) {
    cfg.base.clear();
    for (const auto& s : a.base) cfg.base.push_back(parse_complex(s));
  }
  return cfg;
}

int cmd_run(const CommonArgs& a, double break_norm, double break_fiber, double break_mixed, int samples, bool verbose) {
  ScenarioConfig cfg = build_config(a);
  if (break_norm != 0.0) cfg.break_normalization = break_norm;
  if (break_fiber != 0.0) cfg.breakage.fiber = break_fiber;
  if (break_mixed != 0.0) cfg.breakage.mixed = break_mixed;
  if (samples > 0) cfg.green_samples = samples;
  cfg.verbose = cfg.verbose || verbose;
  const ScenarioResult r = run_scenario(cfg);
  std::cout << r.report_json;
  for (const auto& f : r.failures) std::cerr << "FAIL " << f << "\n";
  return r.exit_code;
}

int cmd_green(const CommonArgs& a, const std::string& profile, double tol) {
  const ScenarioConfig cfg = build_config(a);
  const PeriodFamily fam = resolve_family(cfg);
  for (cplx s : resolve_base_points(cfg, fam)) {
    const GreenOperator op(fam.recentered(s).period(0.0));
    const LowerBound lb = green_lower_bound(op, tol);
    std::printf("s=%s c=%.12g min=%.12g margin=%.3g quad_err=%.3g\n", format_complex(s).c_str(), lb.c, lb.minimum,
                lb.margin, lb.quadrature_error);
    if (!profile.empty()) io::write_text(profile, kernel_profile_csv(op));
  }
  return 0;
}

int cmd_wp(const CommonArgs& a) {
  const ScenarioConfig cfg = build_config(a);
  const PeriodFamily fam = resolve_family(cfg);
  for (cplx s : resolve_base_points(cfg, fam)) {
    const PeriodFamily local = fam.recentered(s);
    const AdmissibleForm w = build_admissible(local, SParameterStencil{0.0, cfg.step}, resolve_grid(cfg, fam.n()));
    std::printf("s=%s wp=%.15g closed_form=%.15g log_det=%.15g\n", format_complex(s).c_str(), wp_metric(w),
                wp_closed_form(local, 0.0), wp_logdet(local, 0.0));
  }
  return 0;
}

int cmd_solve_ma(const CommonArgs& a, const std::string& trace, bool verbose) {
  const ScenarioConfig cfg = build_config(a);
  const PeriodFamily fam = resolve_family(cfg);
  const int n_grid = resolve_grid(cfg, fam.n());
  for (cplx s : resolve_base_points(cfg, fam)) {
    const PeriodMatrix pm = fam.recentered(s).period(0.0);
    const GridPtr grid = FiberGrid::make(pm, n_grid);
    const PerturbationSpec psi = cfg.psi.modes.empty() ? PerturbationSpec::standard(fam.n()) : cfg.psi;
    const TensorField psi_field = TensorField::scalar(grid, evaluate_psi(psi, *grid, 0.0));
    // reference metric flat + ddbar psi; the Ricci-flat correction is then phi = -psi
    const MongeAmpereProblem prob(corrected_metric(MetricField::flat(grid), psi_field));
    const MaSolution sol = solve_ricci_flat(prob);
    double err = 0.0;
    for (std::size_t p = 0; p < psi_field.nodes(); ++p)
      err = std::max(err, std::abs(sol.phi.values()[p] + psi_field.values()[p]));
    std::printf("s=%s iterations=%d b=%.3g sup|phi+psi|=%.3g\n", format_complex(s).c_str(), sol.iterations, sol.b, err);
    if (verbose) std::cout << trace_csv(sol.trace);
    if (!trace.empty()) io::write_text(trace, trace_csv(sol.trace));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cyfam: Ricci-flat torus families, curvature and positivity checks"};
  app.require_subcommand(1);

  CommonArgs run_args, green_args, wp_args, ma_args;
  double break_norm = 0.0, break_fiber = 0.0, break_mixed = 0.0;
  int samples = 0;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "run the full pipeline and print report.json");
  add_common(run, run_args);
  run->add_option("--break-normalization", break_norm, "add i ddbar(c |s|^2) to the form");
  run->add_option("--break-fiber", break_fiber, "non-flat fiber perturbation amplitude");
  run->add_option("--break-mixed", break_mixed, "mixed-component perturbation amplitude");
  run->add_option("--green-samples", samples, "base samples per direction for the Green bound");
  run->add_flag("--verbose", verbose, "also write the admissible form");

  auto* list = app.add_subcommand("list-presets", "list preset families");
  auto* schema = app.add_subcommand("schema", "print the annotated default configuration");

  std::string profile;
  double green_tol = 1e-6;
  auto* green = app.add_subcommand("green-bound", "lower bound of the fiber Green kernel");
  add_common(green, green_args);
  green->add_option("--profile", profile, "write a kernel profile CSV (n = 1)");
  green->add_option("--green-tol", green_tol, "quadrature tolerance");

  auto* wp = app.add_subcommand("wp", "Weil-Petersson metric at base points");
  add_common(wp, wp_args);

  std::string trace;
  bool ma_verbose = false;
  auto* ma = app.add_subcommand("solve-ma", "recover an injected potential with the Monge-Ampere solver");
  add_common(ma, ma_args);
  ma->add_option("--trace", trace, "write the Newton trace CSV");
  ma->add_flag("--verbose", ma_verbose, "print the Newton trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_args, break_norm, break_fiber, break_mixed, samples, verbose);
    if (*list) {
      std::cout << list_presets();
      return 0;
    }
    if (*schema) {
      std::cout << dump_config_schema();
      return 0;
    }
    if (*green) return cmd_green(green_args, profile, green_tol);
    if (*wp) return cmd_wp(wp_args);
    if (*ma) return cmd_solve_ma(ma_args, trace, ma_verbose);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
