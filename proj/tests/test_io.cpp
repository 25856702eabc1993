#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <random>
#include <regex>

#include "cyfam/error.hpp"
#include "cyfam/io.hpp"
#include "cyfam/scenario.hpp"
#include "support.hpp"

using namespace cyfam;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cyfam_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Cli {
  int code;
  std::string out;
};

Cli cli(const std::string& args) {
  const std::string cmd = std::string(CYFAM_CLI) + " " + args + " 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t k = std::fread(buf, 1, sizeof buf, f)) out.append(buf, k);
  const int status = pclose(f);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string without_timestamp(const std::string& s) {
  return std::regex_replace(s, std::regex("\"timestamp\": \"[^\"]*\""), "\"timestamp\": \"\"");
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("field CSV round trip") {
    const GridPtr g = FiberGrid::make(preset_family("siegel-e").period(0.0), 8);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> d;
    TensorField t(g, {Slot::up_holo, Slot::down_anti});
    for (auto& z : t.values()) z = cplx(d(rng), d(rng));
    const fs::path dir = scratch("csv");
    io::write_field_csv(dir / "t.csv", t);
    const TensorField back = io::read_field_csv(dir / "t.csv", g, t.variance());
    CHECK((back - t).sup_norm() == 0.0);
    CHECK_THROWS_AS(io::read_field_csv(dir / "t.csv", g, Variance{Slot::down_holo}), ShapeError);
    const GridPtr g16 = FiberGrid::make(preset_family("siegel-e").period(0.0), 16);
    CHECK_THROWS_AS(io::read_field_csv(dir / "t.csv", g16, t.variance()), ShapeError);
  }

  TEST_CASE("admissible form round trip") {
    BuildOptions opts;
    opts.mode = Provenance::solver_corrected;
    const AdmissibleForm w = build_admissible(preset_family("elliptic"), {cplx(0.05, 0.0), 1e-2}, 16, opts);
    const fs::path dir = scratch("form");
    io::write_form(dir, w);
    const AdmissibleForm r = io::read_form(dir);
    CHECK(r.provenance == w.provenance);
    CHECK(r.stencil.center == w.stencil.center);
    CHECK(r.stencil.h == w.stencil.h);
    REQUIRE(r.fibers.size() == w.fibers.size());
    for (std::size_t k = 0; k < w.fibers.size(); ++k) CHECK((r.fibers[k].g() - w.fibers[k].g()).sup_norm() == 0.0);
    CHECK((r.mixed() - w.mixed()).sup_norm() == 0.0);
    CHECK((r.g_ss - w.g_ss).sup_norm() == 0.0);
    CHECK((phi(r) - phi(w)).sup_norm() == 0.0);
  }
}

TEST_SUITE("scenario") {
  TEST_CASE("schema parses back to the defaults") {
    CHECK(parse_config(dump_config_schema()) == ScenarioConfig{});
    CHECK(parse_config("") == ScenarioConfig{});
  }

  TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid = \"big\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[tolerances]\nnot_a_residual = 1e-3\n"), ConfigError);
    ScenarioConfig cfg;
    cfg.family = "no-such-family";
    CHECK_THROWS_AS(resolve_family(cfg), ConfigError);
    CHECK_THROWS_AS(set_tolerance(cfg, "eq6"), ConfigError);
    CHECK_THROWS_AS(set_tolerance(cfg, "eq6=-1"), ConfigError);
    CHECK_THROWS_AS(set_tolerance(cfg, "nope=1e-3"), ConfigError);
    set_tolerance(cfg, "eq6=1e-7");
    bool found = false;
    for (const auto& [name, v] : effective_tolerances(cfg))
      if (name == "eq6") found = (v == 1e-7);
    CHECK(found);
  }

  TEST_CASE("toml overrides") {
    const ScenarioConfig c = parse_config("family = \"siegel-e\"\ngrid = 8\nseed = 5\n[tolerances]\neq13 = 2e-6\n");
    CHECK(c.family == "siegel-e");
    CHECK(c.grid == 8);
    CHECK(c.seed == 5u);
    REQUIRE(c.tolerances.size() == 1u);
    CHECK(c.tolerances[0].first == "eq13");
  }

  TEST_CASE("constant family: exit 0, non-effective") {
    ScenarioConfig cfg;
    cfg.family = "constant";
    cfg.green_samples = 3;
    const ScenarioResult r = run_scenario(cfg);
    CHECK(r.exit_code == 0);
    REQUIRE(r.points.size() == 1u);
    CHECK_FALSE(r.points[0].global.effective);
    const auto j = nlohmann::json::parse(r.report_json);
    CHECK(j["base_points"][0]["global_form"]["effective"] == false);
  }

  TEST_CASE("report is reproducible apart from the timestamp") {
    ScenarioConfig cfg;
    cfg.at = {I};
    cfg.green_samples = 3;
    cfg.out = scratch("report").string();
    const ScenarioResult a = run_scenario(cfg);
    const ScenarioResult b = run_scenario(cfg);
    CHECK(a.exit_code == 0);
    CHECK(without_timestamp(a.report_json) == without_timestamp(b.report_json));
    CHECK(fs::exists(fs::path(cfg.out) / "report.json"));
    CHECK(fs::exists(fs::path(cfg.out) / "grids" / "bp0_metric.csv"));
    const auto j = nlohmann::json::parse(a.report_json);
    CHECK(j["base_points"][0]["theta_ss"].get<double>() == doctest::Approx(0.25).epsilon(1e-6));
    // every residual is addressable by name
    std::vector<std::string> names;
    for (const auto& x : j["base_points"][0]["residuals"]) names.push_back(x["name"]);
    for (const char* want : {"eq1", "eq6", "eq13", "eq18", "eq20", "remark1", "det-identity", "green-reconstruction"})
      CHECK(std::find(names.begin(), names.end(), want) != names.end());
  }

  TEST_CASE("injected normalization violation fails") {
    ScenarioConfig cfg;
    cfg.green_samples = 3;
    cfg.break_normalization = 0.1;
    const ScenarioResult r = run_scenario(cfg);
    CHECK(r.exit_code == 1);
    CHECK_FALSE(r.failures.empty());
  }
}

TEST_SUITE("cli") {
  TEST_CASE("run at tau = i") {
    const Cli r = cli("run elliptic --at i --green-samples 3");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["base_points"][0]["wp"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
  }

  TEST_CASE("exit codes") {
    CHECK(cli("run no-such-family").code == 2);
    CHECK(cli("run elliptic --no-such-flag").code == 2);
    CHECK(cli("run elliptic --break-normalization 0.1 --green-samples 3").code == 1);
    CHECK(cli("run constant --green-samples 3").code == 0);
    const Cli l = cli("list-presets");
    CHECK(l.code == 0);
    CHECK(l.out.find("elliptic") != std::string::npos);
    const Cli s = cli("schema");
    CHECK(s.code == 0);
    CHECK(parse_config(s.out) == ScenarioConfig{});
  }
}
