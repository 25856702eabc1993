#include "cyfam/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cyfam/error.hpp"

namespace cyfam {

namespace {

double sup(const TensorField& t) { return t.sup_norm(); }

// out^alpha = g^{b-bar alpha} v_{b-bar}
TensorField raise_anti(const TensorField& v, const MetricField& g) {
  const int n = g.n();
  TensorField out(v.grid(), {Slot::up_holo});
  for (int al = 0; al < n; ++al) {
    auto dst = out.component(static_cast<std::size_t>(al));
    for (int be = 0; be < n; ++be) {
      const auto inv = g.inverse().component(static_cast<std::size_t>(be * n + al));
      const auto src = v.component(static_cast<std::size_t>(be));
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += inv[p] * src[p];
    }
  }
  return out;
}

}  // namespace

CurvatureTensor relative_canonical_curvature(const AdmissibleForm& w, double richardson_tol) {
  std::vector<std::vector<cplx>> logdet;
  for (const auto& f : w.fibers) {
    std::vector<cplx> v(f.det().size());
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = std::log(f.det()[p]);
    logdet.push_back(std::move(v));
  }
  const PotentialHessian hs = potential_hessian(w.family, w.stencil, w.grid(), logdet);
  if (hs.disagreement > 10.0 * richardson_tol)
    throw AccuracyError("base stencil too coarse: Richardson disagreement " + std::to_string(hs.disagreement));
  CurvatureTensor t;
  t.s = w.stencil.center;
  t.h = w.stencil.h;
  t.theta_ss = hs.base;
  t.theta_sb = hs.mixed();
  t.theta_as = hs.mixed_conj;
  t.theta_fiber = hs.fiber;
  t.disagreement = hs.disagreement;
  if (w.provenance == Provenance::closed_form) t.analytic_ss = wp_logdet(w.family, w.stencil.center);
  return t;
}

double wp_metric(const AdmissibleForm& w) {
  const TensorField a = kodaira_spencer(w);
  return integrate(inner_product(a, a, w.metric()), w.metric()).real();
}

TensorField chi(const AdmissibleForm& w, const CurvatureTensor& t) {
  const TensorField a = horizontal_lift(w);
  TensorField out = t.theta_ss;
  auto dst = out.values();
  for (int al = 0; al < w.n(); ++al) {
    const auto av = a.component(static_cast<std::size_t>(al));
    const auto tas = t.theta_as.component(static_cast<std::size_t>(al));
    const auto tsb = t.theta_sb.component(static_cast<std::size_t>(al));
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] -= av[p] * tas[p] + tsb[p] * std::conj(av[p]);
  }
  return out;
}

bool CurvatureReport::pass() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const Residual& r) { return r.pass; });
}

const Residual* CurvatureReport::find(const std::string& name) const {
  for (const auto& r : residuals)
    if (r.name == name) return &r;
  return nullptr;
}

double verify_first_chern(const AdmissibleForm& w, const CurvatureTensor& t, double wp) {
  const double vol = w.metric().volume();
  double r = 0.0;
  for (cplx z : t.theta_ss.values()) r = std::max(r, std::abs(z - wp / vol));
  return std::max({r, sup(t.theta_sb), sup(t.theta_as)});
}

KsResiduals verify_ks(const AdmissibleForm& w, const TensorField& a) {
  const MetricField& g = w.metric();
  const int n = g.n();
  KsResiduals r;
  const TensorField low = contract(a, g.g(), {{0, 0}}, g);  // (b-bar, d-bar)
  const TensorField da = covariant_derivative(a, g, Derivative::anti);  // (a, b-bar, d-bar)
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      const auto x = low.component(static_cast<std::size_t>(b * n + d));
      const auto y = low.component(static_cast<std::size_t>(d * n + b));
      for (std::size_t p = 0; p < x.size(); ++p) r.symmetric = std::max(r.symmetric, std::abs(x[p] - y[p]));
      for (int al = 0; al < n; ++al) {
        const auto u = da.component(static_cast<std::size_t>((al * n + b) * n + d));
        const auto v = da.component(static_cast<std::size_t>((al * n + d) * n + b));
        for (std::size_t p = 0; p < u.size(); ++p) r.closed = std::max(r.closed, std::abs(u[p] - v[p]));
      }
    }
  const TensorField dh = covariant_derivative(a, g, Derivative::holo);  // (a, b-bar, c)
  r.coclosed = sup(trace(dh, 1, 2, g));
  return r;
}

Lemma2Residuals verify_lemma2(const AdmissibleForm& w, const CurvatureTensor& t) {
  const MetricField& g = w.metric();
  Lemma2Residuals r;
  r.holomorphic = sup(spectral_derivative(t.theta_as, Derivative::anti));
  r.eq9 = sup(covariant_derivative(t.theta_as, g, Derivative::holo));
  r.eq10 = sup(covariant_derivative(t.theta_sb, g, Derivative::holo));
  return r;
}

double verify_lemma3(const AdmissibleForm& w, const TensorField& a, const CurvatureTensor& t) {
  const MetricField& g = w.metric();
  TensorField lhs = trace(covariant_derivative(a, g, Derivative::holo), 1, 2, g);
  lhs *= cplx(-1.0);
  return sup(lhs - raise_anti(t.theta_sb, g));
}

double verify_prop3(const AdmissibleForm& w, const CurvatureTensor& t) {
  const MetricField& g = w.metric();
  const TensorField x = chi(w, t);
  TensorField lhs = laplacian(x, g);
  // 2 g^{b-bar a} Theta_{s b-bar} Theta_{a s-bar}
  const TensorField up = raise_anti(t.theta_sb, g);
  auto dst = lhs.values();
  for (int al = 0; al < g.n(); ++al) {
    const auto u = up.component(static_cast<std::size_t>(al));
    const auto v = t.theta_as.component(static_cast<std::size_t>(al));
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += 2.0 * u[p] * v[p];
  }
  return sup(lhs);
}

Corollary1Residuals verify_corollary1(const CurvatureTensor& t) {
  Corollary1Residuals r;
  r.mixed_sb = sup(t.theta_sb);
  r.mixed_as = sup(t.theta_as);
  cplx mean = 0.0;
  for (cplx z : t.theta_ss.values()) mean += z;
  mean /= static_cast<double>(t.theta_ss.nodes());
  for (cplx z : t.theta_ss.values()) r.fiber_constancy = std::max(r.fiber_constancy, std::abs(z - mean));
  return r;
}

double verify_lemma4(const AdmissibleForm& w, const TensorField& a, const CurvatureTensor& t) {
  const MetricField& g = w.metric();
  TensorField lhs = laplacian(phi(w), g);
  lhs += t.theta_ss;
  lhs -= inner_product(a, a, g);
  return sup(lhs);
}

double verify_parallel_tensors(const GridPtr& grid, unsigned seed) {
  const MetricField g = MetricField::flat(grid);
  const int n = grid->n();
  double r = 0.0;
  auto check = [&](const TensorField& t) {
    r = std::max(r, sup(covariant_derivative(t, g, Derivative::holo)));
    r = std::max(r, sup(covariant_derivative(t, g, Derivative::anti)));
  };
  for (int al = 0; al < n; ++al) {
    std::vector<cplx> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(al)] = 1.0;
    check(TensorField::constant(grid, {Slot::up_holo}, e));
    check(TensorField::constant(grid, {Slot::down_holo}, e));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> c(static_cast<std::size_t>(n * n));
  for (auto& z : c) z = cplx(nd(rng), nd(rng));
  check(TensorField::constant(grid, {Slot::up_holo, Slot::down_anti}, c));
  return r;
}

}  // namespace cyfam
