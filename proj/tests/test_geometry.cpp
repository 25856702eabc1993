#include <doctest.h>

#include "cyfam/error.hpp"
#include "cyfam/grid.hpp"
#include "cyfam/torus.hpp"
#include "oracles.hpp"

using namespace cyfam;

TEST_SUITE("torus_geometry") {
  TEST_CASE("period matrix validation") {
    CMat bad(1, 1);
    bad(0, 0) = cplx(0.3, -1.0);
    CHECK_THROWS_AS(PeriodMatrix{bad}, InvalidPeriod);
    CMat asym(2, 2);
    asym << I, 0.1, 0.2, I;
    CHECK_THROWS_AS(PeriodMatrix{asym}, InvalidPeriod);
    CMat ok(1, 1);
    ok(0, 0) = I;
    CHECK(PeriodMatrix(ok).n() == 1);
  }

  TEST_CASE("presets and lookup") {
    bool has_elliptic = false;
    for (const auto& p : presets()) has_elliptic = has_elliptic || p.name == "elliptic";
    CHECK(has_elliptic);
    CHECK_THROWS_AS(preset_family("no-such-family"), ConfigError);
    CHECK(preset_family("siegel-e").n() == 2);
  }

  TEST_CASE("domain checks") {
    const PeriodFamily fam = preset_family("elliptic");
    CHECK_THROWS_AS(fam.period(cplx(0.0, 0.6)), DomainError);
    // Omega = s degenerates at 0
    PeriodFamily degenerate("deg", {CMat::Zero(1, 1), CMat::Identity(1, 1)}, 0.5);
    CHECK_THROWS_AS(degenerate.validate_domain(), InvalidPeriod);
  }

  TEST_CASE("recentering is a Taylor shift, including s0 = 0") {
    CMat c0(1, 1), c1(1, 1), c2(1, 1);
    c0(0, 0) = I;
    c1(0, 0) = 0.5;
    c2(0, 0) = cplx(0.2, 0.1);
    const PeriodFamily fam("quad", {c0, c1, c2}, 0.4);
    for (cplx s0 : {cplx(0.0, 0.0), cplx(0.1, -0.05)}) {
      const PeriodFamily r = fam.recentered(s0);
      for (cplx t : {cplx(0.0, 0.0), cplx(0.03, 0.02), cplx(-0.1, 0.0)}) {
        CHECK(std::abs(r.omega_at(t)(0, 0) - fam.omega_at(s0 + t)(0, 0)) < 1e-14);
        CHECK(std::abs(r.derivative_at(t)(0, 0) - fam.derivative_at(s0 + t)(0, 0)) < 1e-14);
      }
    }
  }

  TEST_CASE("solve_for_period") {
    const PeriodFamily fam = preset_family("elliptic");
    CHECK(std::abs(fam.solve_for_period(2.0 * I) - cplx(0.0, 1.0)) < 1e-14);
    CHECK(std::abs(fam.solve_for_period(cplx(1.0, 1.0)) - cplx(1.0, 0.0)) < 1e-14);
    CHECK_THROWS_AS(preset_family("siegel-e").solve_for_period(I), ConfigError);
  }

  TEST_CASE("closed-form WP matches the log-det oracle") {
    const PeriodFamily fam = preset_family("elliptic");
    for (cplx tau : {I, 2.0 * I, cplx(1.0, 1.0)}) {
      const PeriodFamily local = fam.recentered(fam.solve_for_period(tau));
      CHECK(wp_closed_form(local, 0.0) == doctest::Approx(oracle::wp_elliptic(tau)).epsilon(1e-12));
      CHECK(wp_logdet(local, 0.0) == doctest::Approx(oracle::wp_elliptic(tau)).epsilon(1e-12));
    }
    CHECK(wp_closed_form(preset_family("siegel-e"), 0.0) == doctest::Approx(oracle::wp_siegel_e).epsilon(1e-12));
    CHECK(wp_closed_form(preset_family("constant"), 0.0) == doctest::Approx(0.0));
  }

  TEST_CASE("flat metric has unit volume") {
    for (const char* name : {"elliptic", "siegel-e", "product"}) {
      const PeriodMatrix p = preset_family(name).period(cplx(0.05, 0.02));
      CHECK(flat_volume(p, flat_metric(p)) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }

  TEST_CASE("KS closed form for the elliptic family") {
    // A = -Omega' / (Omega - conj Omega) = -1 / (2 i Im tau)
    const PeriodFamily fam = preset_family("elliptic2i");
    const CMat a = ks_closed_form(fam, 0.0);
    CHECK(std::abs(a(0, 0) - (-1.0 / (2.0 * I * 2.0))) < 1e-15);
  }
}

TEST_SUITE("grid") {
  TEST_CASE("shape requirements") {
    const PeriodMatrix p = preset_family("elliptic").period(0.0);
    CHECK_THROWS_AS(FiberGrid(p, 7), ShapeError);
    CHECK_THROWS_AS(FiberGrid(p, 6), ShapeError);
    CHECK_NOTHROW(FiberGrid(p, 8));
  }

  TEST_CASE("layout and wave numbers") {
    const auto g = FiberGrid::make(preset_family("siegel-e").period(0.0), 8);
    CHECK(g->size() == 4096u);
    CHECK(g->axis_index(1, 3) == 1);
    CHECK(g->axis_index(8, 2) == 1);
    CHECK(g->axis_index(512, 0) == 1);
    CHECK(g->wavenumber(3) == 3);
    CHECK(g->wavenumber(4) == 0);  // Nyquist
    CHECK(g->wavenumber(5) == -3);
  }

  TEST_CASE("Jacobians are consistent") {
    for (const char* name : {"elliptic", "siegel-e", "product"}) {
      const auto g = FiberGrid::make(preset_family(name).period(cplx(0.1, -0.2)), 8);
      CHECK(g->jacobian_residual() < 1e-14);
    }
  }

  TEST_CASE("box symbol at tau = i") {
    const auto g = FiberGrid::make(preset_family("elliptic").period(0.0), 16);
    // mode (1, 0) sits at flat index 16
    CHECK(g->flat_box_symbol()[16] == doctest::Approx(2.0 * oracle::pi * oracle::pi).epsilon(1e-14));
    CHECK(g->flat_box_symbol()[1] == doctest::Approx(2.0 * oracle::pi * oracle::pi).epsilon(1e-14));
    CHECK(g->flat_box_symbol()[17] == doctest::Approx(4.0 * oracle::pi * oracle::pi).epsilon(1e-14));
    CHECK(g->flat_box_symbol()[0] == 0.0);
    double mn = 1e300;
    for (std::size_t m = 1; m < g->size(); ++m)
      if (g->flat_box_symbol()[m] > 0) mn = std::min(mn, g->flat_box_symbol()[m]);
    CHECK(mn == doctest::Approx(2.0 * oracle::pi * oracle::pi));
    const std::vector<double> sym = g->box_symbol(g->flat_metric());
    for (std::size_t m = 0; m < g->size(); ++m) CHECK(sym[m] == doctest::Approx(g->flat_box_symbol()[m]));
  }
}
