#include "cyfam/monge_ampere.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cyfam/error.hpp"

namespace cyfam {

namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// det g_phi - mean(det g_phi); the mean equals e^b det g_flat.
std::vector<double> det_residual(const MetricField& g) {
  const auto det = g.det();
  const double m = mean(det);
  std::vector<double> r(det.size());
  for (std::size_t p = 0; p < det.size(); ++p) r[p] = det[p] - m;
  return r;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

MongeAmpereProblem::MongeAmpereProblem(MetricField reference, double volume_tol)
    : reference_(std::move(reference)) {
  const FiberGrid& grid = reference_.g().fiber();
  flat_det_ = grid.flat_metric().determinant().real();
  const double vol = mean(reference_.det());
  if (std::abs(vol - flat_det_) > volume_tol * flat_det_)
    throw InvalidMetric("reference metric volume " + std::to_string(vol / flat_det_) + " does not match the class");
}

MetricField corrected_metric(const MetricField& g0, const TensorField& phi) {
  if (!phi.is_scalar()) throw ShapeError("potential must be scalar");
  if (!phi.fiber().same_shape(g0.g().fiber())) throw ShapeError("potential and metric live on different grids");
  TensorField hess = spectral_derivative(spectral_derivative(phi, Derivative::holo), Derivative::anti);
  hess += g0.g();
  return MetricField(std::move(hess));
}

double ma_residual(const TensorField& phi, const MongeAmpereProblem& p) {
  return sup_abs(det_residual(corrected_metric(p.reference(), phi)));
}

MaSolution solve_ricci_flat(const MongeAmpereProblem& p, const MaOptions& opts) {
  if (opts.tolerance < 1e-14) throw AccuracyError("Monge-Ampere tolerance below roundoff");
  const GridPtr& grid = p.grid();
  MaSolution sol{TensorField::scalar(grid, cplx{}), 0.0, 0, {}};
  MetricField g = p.reference();
  std::vector<double> res = det_residual(g);
  double r = sup_abs(res);
  double cap = std::min(1.0, opts.initial_damping);
  std::vector<double> history;
  for (int it = 0;; ++it) {
    history.push_back(r);
    if (r <= opts.tolerance) {
      sol.trace.push_back({it, r, 0.0, 0.0});
      break;
    }
    if (it >= opts.max_iterations)
      throw SolverFailure("Monge-Ampere iteration did not converge", std::move(history));
    // Linearization: det(g + dd-bar d) = det g (1 - box_g d) + O(d^2).
    std::vector<cplx> rhs(res.size());
    for (std::size_t q = 0; q < res.size(); ++q) rhs[q] = res[q] / g.det()[q];
    const TensorField delta = poisson_solve(TensorField::scalar(grid, std::move(rhs)), g, opts.poisson);
    double t = cap;
    while (true) {
      if (t < opts.min_step) throw StepFailure("line search exhausted at iteration " + std::to_string(it));
      TensorField trial = sol.phi + delta * cplx(t);
      try {
        MetricField gt = corrected_metric(p.reference(), trial);
        std::vector<double> rt = det_residual(gt);
        const double rn = sup_abs(rt);
        if (rn <= 0.9 * r || rn <= opts.tolerance) {
          sol.trace.push_back({it, r, t, t * delta.sup_norm()});
          sol.phi = std::move(trial);
          g = std::move(gt);
          res = std::move(rt);
          r = rn;
          break;
        }
      } catch (const InvalidMetric&) {
      }
      t *= 0.5;
    }
    ++sol.iterations;
    cap = std::min(1.0, 2.0 * cap);
  }
  // Fix the additive constant: zero mean with respect to the solved (constant) density.
  cplx m = 0.0;
  for (cplx z : sol.phi.values()) m += z;
  m /= static_cast<double>(sol.phi.nodes());
  for (auto& z : sol.phi.values()) z = cplx(z.real() - m.real(), 0.0);
  sol.b = std::log(mean(g.det()) / p.flat_det());
  return sol;
}

std::string trace_csv(const std::vector<MaIteration>& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,residual,damping,decrement\n";
  for (const auto& t : trace) os << t.iteration << ',' << t.residual << ',' << t.damping << ',' << t.decrement << '\n';
  return os.str();
}

}  // namespace cyfam
