#include <doctest.h>

#include "cyfam/error.hpp"
#include "cyfam/family.hpp"
#include "cyfam/monge_ampere.hpp"
#include "cyfam/torus.hpp"

using namespace cyfam;

namespace {

struct Recovery {
  int iterations;
  double error;
  double b;
  double residual;
};

Recovery recover(const char* preset, int points, const PerturbationSpec& psi_spec, const MaOptions& opts = {}) {
  const GridPtr g = FiberGrid::make(preset_family(preset).period(0.0), points);
  const TensorField psi = TensorField::scalar(g, evaluate_psi(psi_spec, *g, 0.0));
  const MongeAmpereProblem prob(corrected_metric(MetricField::flat(g), psi));
  const MaSolution sol = solve_ricci_flat(prob, opts);
  double err = 0.0;
  // psi has zero mean, phi is normalized to zero mean: phi = -psi exactly
  for (std::size_t p = 0; p < g->size(); ++p) err = std::max(err, std::abs(sol.phi.values()[p] + psi.values()[p]));
  return {sol.iterations, err, sol.b, ma_residual(sol.phi, prob)};
}

}  // namespace

TEST_SUITE("ma_solver") {
  TEST_CASE("recovers the injected potential, n = 1") {
    const Recovery r = recover("elliptic", 32, PerturbationSpec::standard(1));
    CHECK(r.error <= 1e-8);
    CHECK(r.iterations <= 2);
    CHECK(std::abs(r.b) < 1e-12);
    CHECK(r.residual <= 1e-10);
  }

  TEST_CASE("recovers the injected potential, n = 2") {
    const Recovery r = recover("siegel-e", 16, PerturbationSpec::standard(2));
    CHECK(r.error <= 1e-8);
    CHECK(r.iterations <= 10);
  }

  TEST_CASE("a flat reference needs no iterations") {
    const GridPtr g = FiberGrid::make(preset_family("product").period(0.0), 8);
    const MaSolution sol = solve_ricci_flat(MongeAmpereProblem(MetricField::flat(g)));
    CHECK(sol.iterations == 0);
    CHECK(sol.phi.sup_norm() == 0.0);
  }

  TEST_CASE("multi-mode potential with a phase") {
    PerturbationSpec spec;
    spec.modes.push_back({{1, 1}, 0.01, 0.4, 0.0});
    spec.modes.push_back({{0, 2}, 0.004, -1.0, 0.0});
    const Recovery r = recover("elliptic", 32, spec);
    CHECK(r.error <= 1e-8);
    CHECK(r.iterations <= 10);
  }

  TEST_CASE("trace and failure modes") {
    const GridPtr g = FiberGrid::make(preset_family("elliptic").period(0.0), 16);
    const TensorField psi = TensorField::scalar(g, evaluate_psi(PerturbationSpec::standard(1), *g, 0.0));
    const MongeAmpereProblem prob(corrected_metric(MetricField::flat(g), psi));
    MaOptions few;
    few.max_iterations = 0;
    CHECK_THROWS_AS(solve_ricci_flat(prob, few), SolverFailure);
    MaOptions tiny;
    tiny.tolerance = 1e-16;
    CHECK_THROWS_AS(solve_ricci_flat(prob, tiny), AccuracyError);
    const MaSolution sol = solve_ricci_flat(prob);
    REQUIRE(!sol.trace.empty());
    CHECK(sol.trace.front().residual > sol.trace.back().residual);
    const std::string csv = trace_csv(sol.trace);
    CHECK(csv.rfind("iteration,residual,damping,decrement\n", 0) == 0);
  }

  TEST_CASE("volume mismatch is rejected") {
    const GridPtr g = FiberGrid::make(preset_family("elliptic").period(0.0), 8);
    CMat twice = 2.0 * g->flat_metric();
    CHECK_THROWS_AS(MongeAmpereProblem(MetricField::constant(g, twice)), InvalidMetric);
  }

  TEST_CASE("indefinite reference from an oversized potential") {
    const GridPtr g = FiberGrid::make(preset_family("elliptic").period(0.0), 16);
    PerturbationSpec big;
    big.modes.push_back({{1, 0}, 0.2, 0.0, 0.0});
    const TensorField psi = TensorField::scalar(g, evaluate_psi(big, *g, 0.0));
    CHECK_THROWS_AS(corrected_metric(MetricField::flat(g), psi), InvalidMetric);
  }
}
