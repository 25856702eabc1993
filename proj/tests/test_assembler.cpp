#include <doctest.h>

#include "cyfam/assembler.hpp"
#include "cyfam/error.hpp"
#include "cyfam/green.hpp"
#include "oracles.hpp"

using namespace cyfam;

namespace {

struct Pipeline {
  AdmissibleForm w;
  CurvatureTensor t;
  double wp;
  double c;
};

Pipeline pipeline(const char* preset, int points) {
  const PeriodFamily fam = preset_family(preset);
  AdmissibleForm w = normalize_admissible(build_admissible(fam, {0.0, 1e-2}, points));
  CurvatureTensor t = relative_canonical_curvature(w);
  const double wp = wp_metric(w);
  const double c = green_lower_bound(GreenOperator(fam.period(0.0)), 1e-6).c;
  return {std::move(w), std::move(t), wp, c};
}

}  // namespace

TEST_SUITE("assembler") {
  TEST_CASE("positive on the elliptic and Siegel presets") {
    for (const char* name : {"elliptic", "siegel-e", "product"}) {
      CAPTURE(name);
      const Pipeline p = pipeline(name, preset_family(name).n() == 1 ? 32 : 8);
      const AssembledForm f = assemble_global_form(p.w, p.wp, p.c);
      CHECK(f.wp_factor == doctest::Approx(p.c + 1.0));
      CHECK(f.fiber_restriction < 1e-12);
      const GlobalFormReport r = positivity_check(f, p.t.theta_ss);
      CHECK(r.pass);
      CHECK(r.effective);
      CHECK(r.min_eigenvalue > 0.0);
      // margin of the density inequality is c Theta on a flat family
      CHECK(r.eq20_margin == doctest::Approx(p.c * p.wp).epsilon(1e-6));
      CHECK(r.remark1_margin >= -1e-8);
      CHECK(r.hermitian_residual < 1e-12);
      CHECK(r.bordered_det_residual < 1e-10);
      CHECK(remark1_check(f) == doctest::Approx(r.remark1_margin));
    }
  }

  TEST_CASE("eq20 margin at tau = i is c times one quarter") {
    const Pipeline p = pipeline("elliptic", 32);
    const GlobalFormReport r = positivity_check(assemble_global_form(p.w, p.wp, p.c), p.t.theta_ss);
    CHECK(p.c >= -oracle::ewald_tau_i()[0].value);
    CHECK(r.eq20_margin == doctest::Approx(0.25 * p.c).epsilon(1e-6));
  }

  TEST_CASE("negative control: the WP term removed") {
    const Pipeline p = pipeline("elliptic", 32);
    const AssembledForm f = assemble_global_form(p.w, p.wp, p.c, 0.0);
    const GlobalFormReport r = positivity_check(f, p.t.theta_ss);
    CHECK(std::abs(r.min_eigenvalue) <= 1e-10);
    CHECK(r.eq20_margin < -0.2);
    CHECK_FALSE(r.pass);
  }

  TEST_CASE("non-effective direction is semidefinite and passes") {
    const Pipeline p = pipeline("constant", 32);
    const GlobalFormReport r = positivity_check(assemble_global_form(p.w, p.wp, p.c), p.t.theta_ss);
    CHECK_FALSE(r.effective);
    CHECK(r.semidefinite);
    CHECK(std::abs(r.min_eigenvalue) <= 1e-12);
    CHECK(r.pass);
  }

  TEST_CASE("negative c is rejected") {
    const Pipeline p = pipeline("elliptic", 16);
    CHECK_THROWS_AS(assemble_global_form(p.w, p.wp, -0.1), ConfigError);
  }
}
