#include "cyfam/assembler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cyfam/error.hpp"

namespace cyfam {

namespace {
constexpr double kEffective = 1e-12;
}

AssembledForm assemble_global_form(const AdmissibleForm& w, double wp, double c, std::optional<double> wp_factor) {
  if (c < 0.0) throw ConfigError("Green bound c must be nonnegative");
  const int n = w.n();
  const MetricField& g = w.metric();
  AssembledForm f;
  f.c = c;
  f.wp = wp;
  f.wp_factor = wp_factor.value_or(c + 1.0);
  f.volume = g.volume();
  f.phi = phi(w);
  std::vector<cplx> det(g.det().begin(), g.det().end());
  f.det_g = TensorField::scalar(w.grid(), std::move(det));
  const TensorField mixed = w.mixed();
  const std::size_t nodes = w.grid()->size();
  f.matrices.resize(nodes);
  for (std::size_t p = 0; p < nodes; ++p) {
    CMat b(n + 1, n + 1);
    b(0, 0) = w.g_ss.values()[p] + f.wp_factor * wp;
    for (int be = 0; be < n; ++be) {
      b(0, 1 + be) = mixed.component(static_cast<std::size_t>(be))[p];
      b(1 + be, 0) = std::conj(b(0, 1 + be));
    }
    b.bottomRightCorner(n, n) = g.at(p);
    f.fiber_restriction = std::max(f.fiber_restriction, (b.bottomRightCorner(n, n) - g.at(p)).cwiseAbs().maxCoeff());
    f.matrices[p] = std::move(b);
  }
  return f;
}

GlobalFormReport positivity_check(const AssembledForm& f, const TensorField& theta_ss, double slack) {
  GlobalFormReport r;
  r.c = f.c;
  r.wp = f.wp;
  r.wp_factor = f.wp_factor;
  r.fiber_restriction = f.fiber_restriction;
  r.effective = f.wp > kEffective;
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  r.eq20_margin = std::numeric_limits<double>::infinity();
  r.node_min_eigenvalues.resize(f.matrices.size());
  double scale = 0.0;
  for (std::size_t p = 0; p < f.matrices.size(); ++p) {
    const CMat& b = f.matrices[p];
    scale = std::max(scale, b.cwiseAbs().maxCoeff());
    r.hermitian_residual = std::max(r.hermitian_residual, (b - b.adjoint()).cwiseAbs().maxCoeff());
    const double ev = min_eigenvalue_hermitian(b);
    r.node_min_eigenvalues[p] = ev;
    if (ev < r.min_eigenvalue) {
      r.min_eigenvalue = ev;
      r.argmin_node = p;
    }
    const double ph = f.phi.values()[p].real();
    const double dg = f.det_g.values()[p].real();
    r.bordered_det_residual =
        std::max(r.bordered_det_residual, std::abs(b.determinant() - (ph + f.wp_factor * f.wp) * dg));
    const double th = theta_ss.values()[p].real();
    r.eq20_margin = std::min(r.eq20_margin, ph + f.wp_factor * f.wp - f.volume * th);
  }
  r.remark1_margin = remark1_check(f);
  // Eigenvalues within roundoff of zero count as semidefinite.
  const double eps = 1e-10 * std::max(1.0, scale);
  r.semidefinite = r.min_eigenvalue <= eps && r.min_eigenvalue >= -eps;
  const bool positive = r.min_eigenvalue > eps;
  const bool ineq = r.eq20_margin >= -slack && r.remark1_margin >= -slack;
  r.pass = ineq && (positive || (r.semidefinite && !r.effective));
  return r;
}

double remark1_check(const AssembledForm& f) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < f.matrices.size(); ++p) {
    const double ph = f.phi.values()[p].real();
    const double dg = f.det_g.values()[p].real();
    m = std::min(m, (ph + f.wp_factor * f.wp) * dg - dg * f.wp);
  }
  return m;
}

}  // namespace cyfam
