#include <doctest.h>

#include "cyfam/curvature.hpp"
#include "cyfam/error.hpp"
#include "oracles.hpp"

using namespace cyfam;

namespace {

AdmissibleForm local_form(const char* preset, cplx tau_or_s, bool by_period, int points, BuildOptions opts = {}) {
  const PeriodFamily fam = preset_family(preset);
  const cplx s = by_period ? fam.solve_for_period(tau_or_s) : tau_or_s;
  return normalize_admissible(build_admissible(fam.recentered(s), {0.0, 1e-2}, points, opts));
}

double fiber_mean(const TensorField& t) {
  cplx m = 0.0;
  for (cplx z : t.values()) m += z;
  return (m / static_cast<double>(t.nodes())).real();
}

}  // namespace

TEST_SUITE("curvature") {
  TEST_CASE("Theta_ss equals WP and the log-det oracle on elliptic fibers") {
    for (cplx tau : {I, 2.0 * I, cplx(1.0, 1.0)}) {
      CAPTURE(tau);
      const AdmissibleForm w = local_form("elliptic", tau, true, 32);
      const CurvatureTensor t = relative_canonical_curvature(w);
      const double wp = wp_metric(w);
      CHECK(std::abs(fiber_mean(t.theta_ss) - oracle::wp_elliptic(tau)) <= 1e-6);
      CHECK(std::abs(wp - oracle::wp_elliptic(tau)) <= 1e-12);
      CHECK(verify_first_chern(w, t, wp) <= 1e-6);
      REQUIRE(t.analytic_ss.has_value());
      CHECK(*t.analytic_ss == doctest::Approx(oracle::wp_elliptic(tau)).epsilon(1e-12));
      CHECK(t.theta_fiber.sup_norm() < 1e-8);
    }
  }

  TEST_CASE("Siegel WP") {
    const AdmissibleForm w = local_form("siegel-e", 0.0, false, 16);
    const CurvatureTensor t = relative_canonical_curvature(w);
    CHECK(std::abs(wp_metric(w) - oracle::wp_siegel_e) <= 1e-6);
    CHECK(std::abs(fiber_mean(t.theta_ss) - oracle::wp_siegel_e) <= 1e-6);
  }

  TEST_CASE("harmonicity identities on every preset") {
    for (const auto& p : presets()) {
      CAPTURE(p.name);
      const AdmissibleForm w = local_form(p.name.c_str(), 0.0, false, p.make().n() == 1 ? 32 : 8);
      const CurvatureTensor t = relative_canonical_curvature(w);
      const TensorField a = kodaira_spencer(w);
      const KsResiduals ks = verify_ks(w, a);
      CHECK(ks.symmetric <= 1e-8);
      CHECK(ks.closed <= 1e-8);
      CHECK(ks.coclosed <= 1e-8);
      const Corollary1Residuals c1 = verify_corollary1(t);
      CHECK(c1.mixed_sb <= 1e-8);
      CHECK(c1.mixed_as <= 1e-8);
      CHECK(c1.fiber_constancy <= 1e-6);
      const Lemma2Residuals l2 = verify_lemma2(w, t);
      CHECK(l2.holomorphic <= 1e-8);
      CHECK(l2.eq9 <= 1e-8);
      CHECK(l2.eq10 <= 1e-8);
      CHECK(verify_lemma3(w, a, t) <= 1e-6);
      CHECK(verify_prop3(w, t) <= 1e-6);
      CHECK(verify_lemma4(w, a, t) <= 1e-6);
    }
  }

  TEST_CASE("parallel tensors of the flat metric") {
    const GridPtr g = FiberGrid::make(preset_family("siegel-e").period(cplx(0.1, 0.0)), 8);
    CHECK(verify_parallel_tensors(g) <= 1e-12);
  }

  TEST_CASE("perturbed mode reproduces the curvature within the solver accuracy") {
    BuildOptions opts;
    opts.mode = Provenance::solver_corrected;
    const AdmissibleForm w = local_form("elliptic", I, true, 32, opts);
    const CurvatureTensor t = relative_canonical_curvature(w);
    CHECK(std::abs(fiber_mean(t.theta_ss) - 0.25) <= 1e-6);
    CHECK(std::abs(wp_metric(w) - 0.25) <= 1e-8);
  }

  TEST_CASE("a non-flat fiber breaks the identities") {
    BuildOptions opts;
    opts.breakage.fiber = 1e-2;
    const AdmissibleForm w = local_form("elliptic", I, true, 32, opts);
    const CurvatureTensor t = relative_canonical_curvature(w);
    CHECK(verify_first_chern(w, t, wp_metric(w)) >= 1e-3);
    CHECK(t.theta_fiber.sup_norm() >= 1e-3);
  }

  TEST_CASE("Richardson guard") {
    const AdmissibleForm w = local_form("elliptic", I, true, 16);
    CHECK_NOTHROW(relative_canonical_curvature(w, 1e-6));
    // a tolerance far below the extrapolation accuracy is refused
    CHECK_THROWS_AS(relative_canonical_curvature(w, 1e-14), AccuracyError);
  }
}
