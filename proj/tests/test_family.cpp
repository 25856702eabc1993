#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>

#include "cyfam/curvature.hpp"
#include "cyfam/error.hpp"
#include "cyfam/family.hpp"
#include "cyfam/green.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cyfam;

namespace {

// Base derivatives of a smooth function of s by the stencil.
StencilDerivatives stencil_of(const std::function<cplx(cplx)>& f, cplx s0, double h) {
  const SParameterStencil st{s0, h};
  std::vector<std::vector<cplx>> vals;
  for (int k = 0; k < SParameterStencil::size; ++k) vals.push_back({f(st.point(k))});
  std::vector<std::span<const cplx>> spans(vals.begin(), vals.end());
  return stencil_derivatives(spans, h);
}

// Real Hessian of F(r) in 4 real variables by central differences with
// one Richardson step.
using Fn4 = std::function<double(const std::array<double, 4>&)>;
double second(const Fn4& f, std::array<double, 4> r, int i, int j, double d) {
  auto at = [&](double di, double dj) {
    std::array<double, 4> q = r;
    q[static_cast<std::size_t>(i)] += di;
    q[static_cast<std::size_t>(j)] += dj;
    return f(q);
  };
  if (i == j) return (at(d, 0) - 2 * f(r) + at(-d, 0)) / (d * d);
  return (at(d, d) - at(d, -d) - at(-d, d) + at(-d, -d)) / (4 * d * d);
}
double second_rich(const Fn4& f, const std::array<double, 4>& r, int i, int j, double d) {
  return (4 * second(f, r, i, j, d / 2) - second(f, r, i, j, d)) / 3;
}
// d_w1 d_{w2-bar} with w1 = r[i1] + i r[i1+1], w2 = r[i2] + i r[i2+1]
cplx wirtinger(const Fn4& f, const std::array<double, 4>& r, int i1, int i2, double d) {
  const double rr = second_rich(f, r, i1, i2, d), ri = second_rich(f, r, i1, i2 + 1, d);
  const double ir = second_rich(f, r, i1 + 1, i2, d), ii = second_rich(f, r, i1 + 1, i2 + 1, d);
  return 0.25 * cplx(rr + ii, ri - ir);
}

}  // namespace

TEST_SUITE("family") {
  TEST_CASE("stencil layout") {
    const SParameterStencil st{cplx(0.1, 0.0), 0.02};
    CHECK(st.point(0) == cplx(0.1, 0.0));
    CHECK(st.offset(1) == cplx(0.02, 0.0));
    CHECK(st.offset(4) == cplx(0.0, -0.02));
    CHECK(st.offset(5) == cplx(0.01, 0.0));
    CHECK_THROWS_AS(SParameterStencil({cplx(0.495, 0.0), 0.01}).validate(preset_family("elliptic")), DomainError);
  }

  TEST_CASE("stencil derivatives are exact on low-degree polynomials") {
    auto f = [](cplx s) { return 1.0 + 2.0 * s + 0.5 * std::conj(s) + 3.0 * s * std::conj(s) + s * s * std::conj(s); };
    const cplx s0(0.1, -0.2);
    const StencilDerivatives d = stencil_of(f, s0, 1e-2);
    CHECK(std::abs(d.d_s[0] - (2.0 + 3.0 * std::conj(s0) + 2.0 * s0 * std::conj(s0))) < 1e-10);
    CHECK(std::abs(d.d_sbar[0] - (0.5 + 3.0 * s0 + s0 * s0)) < 1e-10);
    CHECK(std::abs(d.d_ssbar[0] - (3.0 + 2.0 * s0)) < 1e-8);
  }

  TEST_CASE("Richardson stencil is fourth order") {
    auto f = [](cplx s) { return cplx(std::exp(2.0 * s.real() + s.imag()), 0.0); };
    const double exact = 0.25 * 5.0;  // d d-bar = Laplacian / 4 at s = 0
    const double e1 = std::abs(stencil_of(f, 0.0, 0.2).d_ssbar[0] - exact);
    const double e2 = std::abs(stencil_of(f, 0.0, 0.1).d_ssbar[0] - exact);
    CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("lift velocity moves lattice coordinates at fixed z") {
    const PeriodFamily fam = preset_family("siegel-e");
    const cplx s0(0.05, 0.1);
    const CMat w = lift_velocity(fam, s0);
    const CMat ws = lift_velocity_sbar(fam, s0);
    const Eigen::VectorXd y = (Eigen::VectorXd(2) << 0.3, 0.7).finished();
    // z with lattice coordinates (x, y) = (0.2, -0.1, 0.3, 0.7) at s0
    const CVec z = (Eigen::VectorXd(2) << 0.2, -0.1).finished().cast<cplx>() + fam.omega_at(s0) * y.cast<cplx>();
    // u(z, s) from z = x + Omega(s) y
    auto lattice = [&](cplx s) {
      const CMat om = fam.omega_at(s);
      const RMat im = om.imag();
      const Eigen::VectorXd yy = im.ldlt().solve(z.imag());
      const Eigen::VectorXd xx = z.real() - om.real() * yy;
      Eigen::VectorXd u(4);
      u << xx, yy;
      return u;
    };
    CHECK((lattice(s0).tail(2) - y).norm() < 1e-14);
    const double h = 1e-5;
    const Eigen::VectorXd dre = (lattice(s0 + h) - lattice(s0 - h)) / (2 * h);
    const Eigen::VectorXd dim = (lattice(s0 + cplx(0, h)) - lattice(s0 - cplx(0, h))) / (2 * h);
    const CVec ds = 0.5 * (dre.cast<cplx>() - I * dim.cast<cplx>());
    const CVec v = w * y.cast<cplx>();
    CHECK((ds - v).norm() < 1e-8);
    // d/d s-bar of W at fixed u by differences of W itself
    const CMat dws = 0.5 * ((lift_velocity(fam, s0 + h) - lift_velocity(fam, s0 - h)) / (2 * h) +
                            I * (lift_velocity(fam, s0 + cplx(0, h)) - lift_velocity(fam, s0 - cplx(0, h))) / (2 * h));
    CHECK((dws - ws).norm() < 1e-8);
  }

  TEST_CASE("potential Hessian against brute force in (z, s)") {
    const PeriodFamily fam = preset_family("elliptic");
    const SParameterStencil st{cplx(0.1, 0.05), 1e-2};
    const GridPtr g = FiberGrid::make(fam.period(st.center), 16);
    // Phi(u, s), real, smooth in s
    auto coeff = [](cplx s, double a, double b, double c) {
      return 1.0 + a * s.real() + b * s.imag() + c * std::norm(s);
    };
    auto phi = [&](double x, double y, cplx s) {
      return 0.02 * coeff(s, 0.7, -0.4, 2.0) * std::cos(2 * pi * x) +
             0.015 * coeff(s, -0.3, 0.9, 1.0) * std::sin(2 * pi * (x + y)) + 0.01 * coeff(s, 0.5, 0.5, -1.5) * std::cos(2 * pi * y);
    };
    std::vector<std::vector<cplx>> pot;
    for (int k = 0; k < SParameterStencil::size; ++k) {
      std::vector<cplx> v(g->size());
      for (std::size_t p = 0; p < v.size(); ++p) v[p] = phi(g->coord(p, 0), g->coord(p, 1), st.point(k));
      pot.push_back(std::move(v));
    }
    const PotentialHessian ph = potential_hessian(fam, st, g, pot);
    const TensorField mixed = ph.mixed();

    // r = (Re z, Im z, Re s, Im s)
    const Fn4 F = [&](const std::array<double, 4>& r) {
      const cplx s(r[2], r[3]);
      const cplx om = fam.omega_at(s)(0, 0);
      const double y = r[1] / om.imag();
      const double x = r[0] - om.real() * y;
      return phi(x, y, s);
    };
    const cplx om0 = fam.omega_at(st.center)(0, 0);
    for (std::size_t node : {std::size_t{0}, std::size_t{37}, std::size_t{100}, std::size_t{203}}) {
      const double x = g->coord(node, 0), y = g->coord(node, 1);
      const cplx z = x + om0 * y;
      const std::array<double, 4> r{z.real(), z.imag(), st.center.real(), st.center.imag()};
      const double d = 4e-3;
      CAPTURE(node);
      CHECK(std::abs(ph.fiber.values()[node] - wirtinger(F, r, 0, 0, d)) < 1e-6);
      CHECK(std::abs(mixed.values()[node] - wirtinger(F, r, 2, 0, d)) < 1e-6);
      CHECK(std::abs(ph.mixed_conj.values()[node] - wirtinger(F, r, 0, 2, d)) < 1e-6);
      CHECK(std::abs(ph.base.values()[node] - wirtinger(F, r, 2, 2, d)) < 1e-6);
    }
  }

  TEST_CASE("closed-form build is admissible") {
    for (const char* name : {"elliptic", "siegel-e", "product", "constant"}) {
      CAPTURE(name);
      const PeriodFamily fam = preset_family(name);
      const AdmissibleForm w = build_admissible(fam, {0.0, 1e-2}, fam.n() == 1 ? 32 : 8);
      CHECK(w.fibers.size() == 9u);
      CHECK(restriction_residual(w) < 1e-14);
      CHECK(perpendicularity_residual(w) < 1e-12);
      CHECK(determinant_identity_residual(w) < 1e-12);
      CHECK(d_closed_residual(w) < 1e-7);
      CHECK(phi(w).sup_norm() < 1e-12);
      // horizontal lift vs closed-form KS
      const CMat a0 = ks_closed_form(fam, 0.0);
      const TensorField a = kodaira_spencer(w);
      for (int al = 0; al < fam.n(); ++al)
        for (int be = 0; be < fam.n(); ++be) {
          const std::vector<int> m{al, be};
          for (std::size_t p = 0; p < w.grid()->size(); p += 11)
            CHECK(std::abs(a.component(a.index_of(m))[p] - a0(al, be)) < 1e-10);
        }
    }
  }

  TEST_CASE("perturbed build converges and keeps phi small") {
    BuildOptions opts;
    opts.mode = Provenance::solver_corrected;
    const AdmissibleForm w = build_admissible(preset_family("elliptic"), {0.0, 1e-2}, 32, opts);
    CHECK(w.ma_iterations <= 2);
    CHECK(w.potential.size() == 9u);
    CHECK(restriction_residual(w) < 1e-10);
    CHECK(phi(normalize_admissible(w)).sup_norm() < 1e-7);
  }

  TEST_CASE("normalization removes an injected base potential exactly") {
    const AdmissibleForm w = build_admissible(preset_family("elliptic"), {0.0, 1e-2}, 32);
    const AdmissibleForm bad = pollute(w, 0.1);
    CHECK(std::abs(integrate(phi(bad), bad.metric()).real() - 0.1) < 1e-12);
    const AdmissibleForm fixed = normalize_admissible(bad);
    CHECK(std::abs(integrate(phi(fixed), fixed.metric())) <= 1e-9);
    CHECK((fixed.g_ss - w.g_ss).sup_norm() <= 1e-10);
    CHECK((fixed.mixed() - w.mixed()).sup_norm() <= 1e-10);
    CHECK(verify_green_reconstruction(fixed, kodaira_spencer(fixed)) <= 1e-7);
  }

  TEST_CASE("breakage is visible in the residuals") {
    for (double eps : {1e-3, 1e-2}) {
      CAPTURE(eps);
      BuildOptions opts;
      opts.breakage.fiber = eps;
      const AdmissibleForm wf = build_admissible(preset_family("elliptic"), {0.0, 1e-2}, 32, opts);
      CHECK(restriction_residual(wf) >= eps / 10);
      opts.breakage = {};
      opts.breakage.mixed = eps;
      const AdmissibleForm wm = build_admissible(preset_family("elliptic"), {0.0, 1e-2}, 32, opts);
      CHECK(d_closed_residual(wm) >= eps / 10);
    }
  }
}
