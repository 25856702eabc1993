#include "cyfam/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <future>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "cyfam/error.hpp"
#include "cyfam/io.hpp"

namespace cyfam {

using nlohmann::ordered_json;

namespace {

bool same_matrices(const std::vector<CMat>& a, const std::vector<CMat>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols() || a[i] != b[i]) return false;
  return true;
}

}  // namespace

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  const bool custom_eq = custom.has_value() == o.custom.has_value() &&
                         (!custom || (custom->name == o.custom->name && custom->radius == o.custom->radius &&
                                      same_matrices(custom->coefficients, o.custom->coefficients)));
  return family == o.family && custom_eq && grid == o.grid && step == o.step && base == o.base && at == o.at &&
         mode == o.mode && psi == o.psi && tolerances == o.tolerances && breakage == o.breakage &&
         break_normalization == o.break_normalization && green_samples == o.green_samples &&
         green_tol == o.green_tol && seed == o.seed && out == o.out && verbose == o.verbose;
}

ToleranceTable default_tolerances(Provenance mode) {
  const bool pert = mode == Provenance::solver_corrected;
  return {
      {"eq1", 1e-6},
      {"eq2", 1e-9},
      {"eq3", 1e-9},
      {"eq5-perpendicular", 1e-10},
      {"eq6", 1e-8},
      {"eq7", 1e-8},
      {"eq8", 1e-8},
      {"lemma1", 1e-12},
      {"lemma2-holomorphic", pert ? 1e-6 : 1e-8},
      {"eq9", pert ? 1e-6 : 1e-8},
      {"eq10", pert ? 1e-6 : 1e-8},
      {"eq11", 1e-6},
      {"eq13", pert ? 1e-5 : 1e-6},
      {"eq14", 1e-8},
      {"eq15", 1e-8},
      {"eq16", 1e-6},
      {"eq18", 1e-6},
      {"theta-fiber", 1e-8},
      {"det-identity", 1e-10},
      {"d-closed", 1e-7},
      {"wp-closed-form", 1e-6},
      {"green-reconstruction", 1e-7},
      {"green-inequality", 1e-12},
      {"green-soundness", 1e-12},
      {"eq20", 1e-8},
      {"remark1", 1e-8},
  };
}

ToleranceTable effective_tolerances(const ScenarioConfig& cfg) {
  ToleranceTable t = default_tolerances(cfg.mode);
  for (const auto& [name, value] : cfg.tolerances)
    for (auto& entry : t)
      if (entry.first == name) entry.second = value;
  return t;
}

void set_tolerance(ScenarioConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("tolerance must be name=value: " + assignment);
  const std::string name = assignment.substr(0, eq);
  double value = 0.0;
  try {
    value = std::stod(assignment.substr(eq + 1));
  } catch (const std::exception&) {
    throw ConfigError("tolerance value is not a number: " + assignment);
  }
  const ToleranceTable defaults = default_tolerances(cfg.mode);
  if (std::none_of(defaults.begin(), defaults.end(), [&](const auto& e) { return e.first == name; }))
    throw ConfigError("unknown tolerance name: " + name);
  if (!(value > 0.0)) throw ConfigError("tolerance must be positive: " + assignment);
  for (auto& e : cfg.tolerances)
    if (e.first == name) {
      e.second = value;
      return;
    }
  cfg.tolerances.emplace_back(name, value);
}

namespace {

void check_keys(const toml::table& t, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [k, v] : t) {
    (void)v;
    if (std::find(known.begin(), known.end(), k.str()) == known.end())
      throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where);
  }
}

template <class T>
T get_or(const toml::table& t, std::string_view key, T fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = n->value<double>()) return *v;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = n->value<bool>()) return *v;
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = n->value<std::string>()) return *v;
  } else {
    if (auto v = n->value<std::int64_t>()) return static_cast<T>(*v);
  }
  throw ConfigError("key '" + std::string(key) + "' has the wrong type");
}

std::vector<cplx> complex_list(const toml::table& t, std::string_view key) {
  std::vector<cplx> out;
  const toml::node* n = t.get(key);
  if (!n) return out;
  const toml::array* arr = n->as_array();
  if (!arr) throw ConfigError("key '" + std::string(key) + "' must be an array of strings");
  for (const auto& e : *arr) {
    if (auto s = e.value<std::string>())
      out.push_back(parse_complex(*s));
    else if (auto d = e.value<double>())
      out.push_back(*d);
    else
      throw ConfigError("entries of '" + std::string(key) + "' must be complex strings");
  }
  return out;
}

CMat parse_matrix(const toml::node& node) {
  const toml::array* rows = node.as_array();
  if (!rows || rows->empty()) throw ConfigError("coefficient matrix must be a nonempty array of rows");
  const int n = static_cast<int>(rows->size());
  CMat m(n, n);
  for (int r = 0; r < n; ++r) {
    const toml::array* row = (*rows)[static_cast<std::size_t>(r)].as_array();
    if (!row || static_cast<int>(row->size()) != n) throw ConfigError("coefficient matrix must be square");
    for (int c = 0; c < n; ++c) {
      const auto& e = (*row)[static_cast<std::size_t>(c)];
      if (auto s = e.value<std::string>())
        m(r, c) = parse_complex(*s);
      else if (auto d = e.value<double>())
        m(r, c) = *d;
      else
        throw ConfigError("matrix entries must be complex strings");
    }
  }
  return m;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string("TOML parse error: ") + std::string(e.description()));
  }
  check_keys(root, {"family", "grid", "step", "base", "at", "mode", "seed", "out", "verbose", "custom", "tolerances",
                    "perturbation", "break", "green"},
             "configuration");
  ScenarioConfig cfg;
  cfg.family = get_or<std::string>(root, "family", cfg.family);
  cfg.grid = get_or<int>(root, "grid", cfg.grid);
  cfg.step = get_or<double>(root, "step", cfg.step);
  cfg.base = complex_list(root, "base");
  cfg.at = complex_list(root, "at");
  const std::string mode = get_or<std::string>(root, "mode", "closed-form");
  if (mode == "closed-form")
    cfg.mode = Provenance::closed_form;
  else if (mode == "perturbed")
    cfg.mode = Provenance::solver_corrected;
  else
    throw ConfigError("mode must be closed-form or perturbed");
  cfg.seed = static_cast<std::uint64_t>(get_or<std::int64_t>(root, "seed", 1));
  cfg.out = get_or<std::string>(root, "out", "");
  cfg.verbose = get_or<bool>(root, "verbose", false);
  if (cfg.grid != 0 && (cfg.grid < 8 || cfg.grid % 2 != 0)) throw ConfigError("grid must be even and at least 8");
  if (!(cfg.step > 0.0)) throw ConfigError("step must be positive");

  if (const toml::table* c = root["custom"].as_table()) {
    check_keys(*c, {"name", "radius", "coefficients"}, "[custom]");
    CustomFamily f;
    f.name = get_or<std::string>(*c, "name", f.name);
    f.radius = get_or<double>(*c, "radius", f.radius);
    const toml::array* coeffs = (*c)["coefficients"].as_array();
    if (!coeffs || coeffs->empty()) throw ConfigError("[custom] needs coefficients");
    for (const auto& m : *coeffs) f.coefficients.push_back(parse_matrix(m));
    cfg.custom = f;
    cfg.family = f.name;
  }
  if (const toml::table* t = root["tolerances"].as_table()) {
    for (const auto& [k, v] : *t) {
      auto d = v.value<double>();
      if (!d) throw ConfigError("tolerance '" + std::string(k.str()) + "' must be a number");
      std::ostringstream os;
      os.precision(17);
      os << k.str() << '=' << *d;
      set_tolerance(cfg, os.str());
    }
  }
  if (const toml::table* p = root["perturbation"].as_table()) {
    check_keys(*p, {"modes"}, "[perturbation]");
    if (const toml::array* modes = (*p)["modes"].as_array()) {
      for (const auto& m : *modes) {
        const toml::table* mt = m.as_table();
        if (!mt) throw ConfigError("perturbation modes must be tables");
        check_keys(*mt, {"k", "amplitude", "phase", "coupling"}, "perturbation mode");
        PsiMode pm;
        const toml::array* k = (*mt)["k"].as_array();
        if (!k) throw ConfigError("perturbation mode needs k");
        for (const auto& e : *k) {
          auto v = e.value<std::int64_t>();
          if (!v) throw ConfigError("wave numbers must be integers");
          pm.k.push_back(static_cast<int>(*v));
        }
        pm.amplitude = get_or<double>(*mt, "amplitude", 0.0);
        pm.phase = get_or<double>(*mt, "phase", 0.0);
        pm.s_coupling = parse_complex(get_or<std::string>(*mt, "coupling", "0"));
        cfg.psi.modes.push_back(pm);
      }
    }
  }
  if (const toml::table* b = root["break"].as_table()) {
    check_keys(*b, {"fiber", "mixed", "normalization"}, "[break]");
    cfg.breakage.fiber = get_or<double>(*b, "fiber", 0.0);
    cfg.breakage.mixed = get_or<double>(*b, "mixed", 0.0);
    cfg.break_normalization = get_or<double>(*b, "normalization", 0.0);
  }
  if (const toml::table* g = root["green"].as_table()) {
    check_keys(*g, {"samples", "tol"}, "[green]");
    cfg.green_samples = get_or<int>(*g, "samples", cfg.green_samples);
    cfg.green_tol = get_or<double>(*g, "tol", cfg.green_tol);
    if (cfg.green_samples < 1) throw ConfigError("green.samples must be at least 1");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(io::read_text(path)); }

std::string dump_config_schema() {
  std::ostringstream os;
  os << "# cyfam scenario configuration. Complex numbers are strings such as \"i\", \"1+2i\", \"-0.5\".\n"
        "\n"
        "# Preset name (see `cyfam list-presets`), or the name given in [custom].\n"
        "family = \"elliptic\"\n"
        "# Points per real fiber dimension; 0 picks 32 for n = 1 and 16 otherwise.\n"
        "grid = 0\n"
        "# Base stencil step h; derivatives in s use h and h/2 with Richardson extrapolation.\n"
        "step = 0.01\n"
        "# Absolute base parameters s. With neither base nor at, s = 0 is used.\n"
        "base = []\n"
        "# Period values tau for one-dimensional fibers; s is solved from Omega(s) = tau.\n"
        "at = []\n"
        "# closed-form | perturbed\n"
        "mode = \"closed-form\"\n"
        "seed = 1\n"
        "# Output directory for report.json and grids/; empty writes nothing.\n"
        "out = \"\"\n"
        "verbose = false\n"
        "\n"
        "# [custom]\n"
        "# name = \"mine\"\n"
        "# radius = 0.5\n"
        "# coefficients = [ [[\"i\"]], [[\"1\"]] ]   # Omega(s) = sum_k C_k s^k\n"
        "\n"
        "[tolerances]\n";
  for (const auto& [name, value] : default_tolerances(Provenance::closed_form))
    os << "# \"" << name << "\" = " << value << "\n";
  os << "\n"
        "[perturbation]\n"
        "# Empty selects 0.05 cos 2 pi x (n = 1) or 0.03 (cos 2 pi x1 + cos 2 pi y2) (n = 2).\n"
        "# modes = [ { k = [1, 0], amplitude = 0.05, phase = 0.0, coupling = \"0\" } ]\n"
        "\n"
        "[break]\n"
        "fiber = 0.0\n"
        "mixed = 0.0\n"
        "normalization = 0.0\n"
        "\n"
        "[green]\n"
        "# Base samples per direction for the family-level Green bound.\n"
        "samples = 9\n"
        "tol = 1e-06\n";
  return os.str();
}

std::string list_presets() {
  std::ostringstream os;
  for (const auto& p : presets()) os << p.name << "\t" << p.description << "\n";
  return os.str();
}

PeriodFamily resolve_family(const ScenarioConfig& cfg) {
  if (cfg.custom) {
    PeriodFamily f(cfg.custom->name, cfg.custom->coefficients, cfg.custom->radius);
    f.validate_domain();
    return f;
  }
  return preset_family(cfg.family);
}

std::vector<cplx> resolve_base_points(const ScenarioConfig& cfg, const PeriodFamily& fam) {
  std::vector<cplx> out = cfg.base;
  for (cplx tau : cfg.at) out.push_back(fam.solve_for_period(tau));
  if (out.empty()) out.push_back(0.0);
  return out;
}

int resolve_grid(const ScenarioConfig& cfg, int n) { return cfg.grid != 0 ? cfg.grid : (n == 1 ? 32 : 16); }

namespace {

ordered_json matrix_json(const CMat& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(format_complex(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

double tolerance(const ToleranceTable& t, const std::string& name) {
  for (const auto& e : t)
    if (e.first == name) return e.second;
  throw ConfigError("no tolerance for " + name);
}

struct StageError {
  std::string stage;
  std::string message;
};

// Uniform samples of the base disc around s along the real and imaginary axes.
std::vector<cplx> disc_samples(cplx s, double radius, int per_direction) {
  std::vector<cplx> out{s};
  if (per_direction <= 1) return out;
  for (int j = 0; j < per_direction; ++j) {
    const double t = -radius + 2.0 * radius * j / (per_direction - 1);
    if (std::abs(t) < 1e-15) continue;
    out.push_back(s + t);
    out.push_back(s + cplx(0.0, t));
  }
  return out;
}

BasePointResult run_point(const ScenarioConfig& cfg, const PeriodFamily& global, cplx s, int grid, double c,
                          const ToleranceTable& tols, const std::filesystem::path& grid_dir, std::size_t index) {
  BasePointResult r;
  r.s = s;
  std::string stage = "build";
  try {
    const PeriodFamily fam = global.recentered(s);
    fam.validate_domain();
    r.omega = fam.omega_at(0.0);
    BuildOptions opts;
    opts.mode = cfg.mode;
    opts.psi = cfg.psi.modes.empty() ? PerturbationSpec::standard(fam.n()) : cfg.psi;
    opts.breakage = cfg.breakage;
    const SParameterStencil stencil{0.0, cfg.step};
    AdmissibleForm w = build_admissible(fam, stencil, grid, opts);
    r.ma_iterations = w.ma_iterations;

    stage = "normalize";
    w = normalize_admissible(w);
    if (cfg.break_normalization != 0.0) w = pollute(w, cfg.break_normalization);

    stage = "curvature";
    const CurvatureTensor theta = relative_canonical_curvature(w, tolerance(tols, "eq1"));
    const TensorField a = kodaira_spencer(w);
    r.wp = wp_metric(w);
    r.wp_closed = wp_closed_form(fam, 0.0);
    r.theta_ss = harmonic_projection(theta.theta_ss, w.metric()).real();
    r.theta_analytic = theta.analytic_ss;

    stage = "verify";
    std::vector<std::pair<std::string, double>> values;
    const TensorField ph = phi(w);
    values.emplace_back("eq1", verify_first_chern(w, theta, r.wp));
    values.emplace_back("eq2", restriction_residual(w));
    values.emplace_back("eq3", std::abs(integrate(ph, w.metric())));
    values.emplace_back("eq5-perpendicular", perpendicularity_residual(w));
    const KsResiduals ks = verify_ks(w, a);
    values.emplace_back("eq6", ks.symmetric);
    values.emplace_back("eq7", ks.closed);
    values.emplace_back("eq8", ks.coclosed);
    values.emplace_back("lemma1", verify_parallel_tensors(w.grid()));
    const Lemma2Residuals l2 = verify_lemma2(w, theta);
    values.emplace_back("lemma2-holomorphic", l2.holomorphic);
    values.emplace_back("eq9", l2.eq9);
    values.emplace_back("eq10", l2.eq10);
    values.emplace_back("eq11", verify_lemma3(w, a, theta));
    values.emplace_back("eq13", verify_prop3(w, theta));
    const Corollary1Residuals c1 = verify_corollary1(theta);
    values.emplace_back("eq14", c1.mixed_sb);
    values.emplace_back("eq15", c1.mixed_as);
    values.emplace_back("eq16", c1.fiber_constancy);
    values.emplace_back("eq18", verify_lemma4(w, a, theta));
    values.emplace_back("theta-fiber", theta.theta_fiber.sup_norm());
    values.emplace_back("det-identity", determinant_identity_residual(w));
    values.emplace_back("d-closed", d_closed_residual(w));
    values.emplace_back("wp-closed-form", std::abs(r.wp - *r.wp_closed));

    stage = "green";
    values.emplace_back("green-reconstruction", verify_green_reconstruction(w, a));
    {
      const TensorField gaa = green_apply(inner_product(a, a, w.metric()), w.metric());
      const double vol = w.metric().volume();
      double worst = 0.0;
      for (std::size_t p = 0; p < gaa.nodes(); ++p)
        worst = std::max(worst, -(gaa.values()[p].real() + c * vol * theta.theta_ss.values()[p].real()));
      values.emplace_back("green-inequality", worst);
      const GreenOperator op(PeriodMatrix(r.omega));
      std::mt19937_64 rng(cfg.seed + index);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      double gmin = std::numeric_limits<double>::infinity();
      std::vector<double> u(static_cast<std::size_t>(2 * fam.n()));
      for (int k = 0; k < 1000; ++k) {
        for (double& x : u) x = uni(rng);
        gmin = std::min(gmin, op.green_kernel(u));
      }
      values.emplace_back("green-soundness", std::max(0.0, -(gmin + c)));
    }

    stage = "assemble";
    const AssembledForm form = assemble_global_form(w, r.wp, c);
    r.global = positivity_check(form, theta.theta_ss, tolerance(tols, "eq20"));
    values.emplace_back("eq20", std::max(0.0, -r.global.eq20_margin));
    values.emplace_back("remark1", std::max(0.0, -r.global.remark1_margin));

    for (const auto& [name, value] : values) {
      const double tol = tolerance(tols, name);
      r.residuals.push_back({name, value, tol, value <= tol});
    }
    const bool residuals_pass = std::all_of(r.residuals.begin(), r.residuals.end(), [](const Residual& x) { return x.pass; });
    r.pass = residuals_pass && r.global.pass;
    if (!r.pass) r.failed_stage = "verify";

    if (!grid_dir.empty()) {
      const std::string tag = "bp" + std::to_string(index) + "_";
      io::write_field_csv(grid_dir / (tag + "metric.csv"), w.metric().g());
      io::write_field_csv(grid_dir / (tag + "ks.csv"), a);
      io::write_field_csv(grid_dir / (tag + "phi.csv"), ph);
      io::write_field_csv(grid_dir / (tag + "theta_ss.csv"), theta.theta_ss);
      io::write_scalar_csv(grid_dir / (tag + "eigen.csv"), *w.grid(), r.global.node_min_eigenvalues, "min_eigenvalue");
      if (cfg.verbose) io::write_form(grid_dir / ("form_bp" + std::to_string(index)), w);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.pass = false;
    r.failed_stage = stage;
    r.error = e.what();
  }
  return r;
}

ordered_json point_json(const BasePointResult& r) {
  ordered_json j;
  j["s"] = format_complex(r.s);
  j["omega"] = r.omega.size() ? matrix_json(r.omega) : ordered_json::array();
  j["wp"] = r.wp;
  j["wp_closed_form"] = r.wp_closed ? ordered_json(*r.wp_closed) : ordered_json(nullptr);
  j["theta_ss"] = r.theta_ss;
  j["theta_ss_log_det"] = r.theta_analytic ? ordered_json(*r.theta_analytic) : ordered_json(nullptr);
  j["ma_iterations"] = r.ma_iterations;
  ordered_json res = ordered_json::array();
  for (const auto& x : r.residuals)
    res.push_back({{"name", x.name}, {"residual", x.value}, {"tolerance", x.tolerance}, {"pass", x.pass}});
  j["residuals"] = res;
  const GlobalFormReport& g = r.global;
  j["global_form"] = {{"c", g.c},
                      {"wp_factor", g.wp_factor},
                      {"min_eigenvalue", g.min_eigenvalue},
                      {"argmin_node", g.argmin_node},
                      {"eq20_margin", g.eq20_margin},
                      {"remark1_margin", g.remark1_margin},
                      {"bordered_det_residual", g.bordered_det_residual},
                      {"hermitian_residual", g.hermitian_residual},
                      {"fiber_restriction", g.fiber_restriction},
                      {"effective", g.effective},
                      {"semidefinite", g.semidefinite},
                      {"pass", g.pass}};
  j["pass"] = r.pass;
  if (!r.failed_stage.empty()) j["failed_stage"] = r.failed_stage;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const PeriodFamily fam = resolve_family(cfg);
  const std::vector<cplx> points = resolve_base_points(cfg, fam);
  const int grid = resolve_grid(cfg, fam.n());
  if (grid < 8 || grid % 2 != 0) throw ConfigError("grid must be even and at least 8");
  if (!(cfg.green_tol > 0.0)) throw ConfigError("green.tol must be positive");
  const ToleranceTable tols = effective_tolerances(cfg);
  for (const auto& m : cfg.psi.modes)
    if (static_cast<int>(m.k.size()) != 2 * fam.n()) throw ConfigError("perturbation wave vectors need 2n entries");

  ScenarioResult out;
  std::vector<std::string> failures;

  // Family-level Green bound, sampled around every base point.
  std::vector<cplx> samples;
  for (cplx s : points)
    for (cplx t : disc_samples(s, fam.domain_radius(), cfg.green_samples)) samples.push_back(t);
  bool green_ok = true;
  try {
    std::vector<PeriodMatrix> periods;
    for (cplx t : samples) periods.push_back(fam.recentered(t).period(0.0));
    const FamilyBound fb = green_family_bound(periods, cfg.green_tol);
    out.c = fb.c;
    out.c_samples = fb.per_sample;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    green_ok = false;
    failures.push_back(std::string("green: ") + e.what());
  }

  std::filesystem::path grid_dir;
  if (!cfg.out.empty()) grid_dir = std::filesystem::path(cfg.out) / "grids";
  if (green_ok) {
    std::vector<std::future<BasePointResult>> jobs;
    for (std::size_t i = 0; i < points.size(); ++i)
      jobs.push_back(std::async(std::launch::async, run_point, std::cref(cfg), std::cref(fam), points[i], grid, out.c,
                                std::cref(tols), grid_dir, i));
    for (auto& j : jobs) out.points.push_back(j.get());
  }
  for (const auto& p : out.points) {
    if (!p.error.empty()) failures.push_back(p.failed_stage + ": " + p.error);
    for (const auto& r : p.residuals)
      if (!r.pass) failures.push_back("verify: " + r.name + " at s=" + format_complex(p.s));
    if (p.error.empty() && !p.global.pass) failures.push_back("assemble: positivity at s=" + format_complex(p.s));
  }
  out.failures = failures;
  const bool pass = green_ok && failures.empty();
  out.exit_code = pass ? 0 : 1;

  ordered_json j;
  j["tool"] = "cyfam";
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["timestamp"] = stamp;
  j["seed"] = cfg.seed;
  j["family"] = {{"name", fam.name()}, {"n", fam.n()}, {"radius", fam.domain_radius()}};
  ordered_json coeffs = ordered_json::array();
  for (const CMat& c : fam.coefficients()) coeffs.push_back(matrix_json(c));
  j["family"]["coefficients"] = coeffs;
  j["mode"] = to_string(cfg.mode);
  j["grid"] = grid;
  j["step"] = cfg.step;
  ordered_json tj = ordered_json::object();
  for (const auto& [name, value] : tols) tj[name] = value;
  j["tolerances"] = tj;
  j["green"] = {{"c", out.c}, {"bound", "sampled-uniform"}, {"tol", cfg.green_tol}};
  ordered_json gs = ordered_json::array();
  for (std::size_t i = 0; i < out.c_samples.size(); ++i)
    gs.push_back({{"s", format_complex(samples[i])}, {"c", out.c_samples[i]}});
  j["green"]["samples"] = gs;
  ordered_json pts = ordered_json::array();
  for (const auto& p : out.points) pts.push_back(point_json(p));
  j["base_points"] = pts;
  j["failures"] = failures;
  j["pass"] = pass;
  out.report_json = j.dump(2) + "\n";
  if (!cfg.out.empty()) io::write_text(std::filesystem::path(cfg.out) / "report.json", out.report_json);
  return out;
}

}  // namespace cyfam
