#include "cyfam/family.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "cyfam/error.hpp"

namespace cyfam {

cplx SParameterStencil::offset(int k) const {
  static const cplx dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  if (k == 0) return 0.0;
  if (k < 1 || k > 8) throw ShapeError("stencil index out of range");
  const double step = k <= 4 ? h : 0.5 * h;
  return step * dirs[(k - 1) % 4];
}

void SParameterStencil::validate(const PeriodFamily& fam) const {
  if (!(h > 0.0)) throw ConfigError("stencil step must be positive");
  for (int k = 0; k < size; ++k)
    if (!fam.contains(point(k)))
      throw DomainError("stencil point " + format_complex(point(k)) + " leaves the domain of " + fam.name());
}

StencilDerivatives stencil_derivatives(const std::vector<std::span<const cplx>>& f, double h) {
  if (f.size() != static_cast<std::size_t>(SParameterStencil::size)) throw ShapeError("need nine stencil samples");
  const std::size_t nodes = f[0].size();
  StencilDerivatives d;
  d.d_s.resize(nodes);
  d.d_sbar.resize(nodes);
  d.d_ssbar.resize(nodes);
  const double hh = 0.5 * h;
  auto rich = [&](cplx coarse, cplx fine) {
    const cplx r = (4.0 * fine - coarse) / 3.0;
    d.disagreement = std::max(d.disagreement, std::abs(r - fine));
    return r;
  };
  for (std::size_t p = 0; p < nodes; ++p) {
    const cplx c = f[0][p];
    const cplx ax1 = f[1][p] - f[2][p], ay1 = f[3][p] - f[4][p];
    const cplx ax2 = f[5][p] - f[6][p], ay2 = f[7][p] - f[8][p];
    d.d_s[p] = rich((ax1 - I * ay1) / (4.0 * h), (ax2 - I * ay2) / (4.0 * hh));
    d.d_sbar[p] = rich((ax1 + I * ay1) / (4.0 * h), (ax2 + I * ay2) / (4.0 * hh));
    d.d_ssbar[p] = rich((f[1][p] + f[2][p] + f[3][p] + f[4][p] - 4.0 * c) / (4.0 * h * h),
                        (f[5][p] + f[6][p] + f[7][p] + f[8][p] - 4.0 * c) / (4.0 * hh * hh));
  }
  return d;
}

PerturbationSpec PerturbationSpec::standard(int n) {
  PerturbationSpec s;
  if (n == 1) {
    s.modes.push_back({{1, 0}, 0.05, 0.0, {0.0, 0.0}});
  } else {
    std::vector<int> k1(static_cast<std::size_t>(2 * n), 0), k2(static_cast<std::size_t>(2 * n), 0);
    k1[0] = 1;
    k2[static_cast<std::size_t>(2 * n - 1)] = 1;
    s.modes.push_back({k1, 0.03, 0.0, {0.0, 0.0}});
    s.modes.push_back({k2, 0.03, 0.0, {0.0, 0.0}});
  }
  return s;
}

std::vector<cplx> evaluate_psi(const PerturbationSpec& spec, const FiberGrid& grid, cplx t) {
  std::vector<cplx> out(grid.size(), cplx{});
  for (const PsiMode& m : spec.modes) {
    if (static_cast<int>(m.k.size()) != grid.axes()) throw ConfigError("perturbation mode has wrong dimension");
    for (int kk : m.k)
      if (2 * std::abs(kk) >= grid.points()) throw ConfigError("perturbation mode is not resolved by the grid");
    const double amp = m.amplitude * (1.0 + (m.s_coupling * t).real());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double arg = m.phase;
      for (int a = 0; a < grid.axes(); ++a) arg += 2.0 * pi * m.k[static_cast<std::size_t>(a)] * grid.coord(p, a);
      out[p] += amp * std::cos(arg);
    }
  }
  return out;
}

const char* to_string(Provenance p) { return p == Provenance::closed_form ? "closed-form" : "solver-corrected"; }

namespace {

std::vector<double> y_coords(const FiberGrid& grid, std::size_t p) {
  std::vector<double> y(static_cast<std::size_t>(grid.n()));
  for (int j = 0; j < grid.n(); ++j) y[static_cast<std::size_t>(j)] = grid.coord(p, grid.n() + j);
  return y;
}

// sum_j y_j L_j + P at every node.
TensorField linear_plus_periodic(const std::vector<TensorField>& lin, const TensorField& per) {
  TensorField out = per;
  const FiberGrid& grid = per.fiber();
  for (std::size_t c = 0; c < out.components(); ++c) {
    auto dst = out.component(c);
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int j = 0; j < grid.n(); ++j) dst[p] += grid.coord(p, grid.n() + j) * lin[static_cast<std::size_t>(j)].component(c)[p];
  }
  return out;
}

// out^alpha = -g^{b-bar alpha} v_b  (lowered anti index to raised holo index).
TensorField raise_negated(const TensorField& v, const MetricField& g) {
  const int n = g.n();
  TensorField out(v.grid(), {Slot::up_holo});
  for (int al = 0; al < n; ++al) {
    auto dst = out.component(static_cast<std::size_t>(al));
    for (int be = 0; be < n; ++be) {
      const auto inv = g.inverse().component(static_cast<std::size_t>(be * n + al));
      const auto src = v.component(static_cast<std::size_t>(be));
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] -= inv[p] * src[p];
    }
  }
  return out;
}

TensorField cos_x1(const GridPtr& grid) {
  std::vector<cplx> v(grid->size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = std::cos(2.0 * pi * grid->coord(p, 0));
  return TensorField::scalar(grid, std::move(v));
}

}  // namespace

TensorField AdmissibleForm::mixed() const { return linear_plus_periodic(mixed_linear, mixed_periodic); }

TensorField PotentialHessian::mixed() const { return linear_plus_periodic(mixed_linear, mixed_periodic); }

CMat lift_velocity(const PeriodFamily& fam, cplx s) {
  const CMat om = fam.omega_at(s);
  const CMat d = fam.derivative_at(s);
  const CMat m = (om - om.conjugate()).inverse();
  const int n = fam.n();
  CMat w(2 * n, n);
  w.topRows(n) = om.conjugate() * m * d;
  w.bottomRows(n) = -m * d;
  return w;
}

CMat lift_velocity_sbar(const PeriodFamily& fam, cplx s) {
  const CMat om = fam.omega_at(s);
  const CMat d = fam.derivative_at(s);
  const CMat db = d.conjugate();
  const CMat m = (om - om.conjugate()).inverse();
  const CMat dm = m * db * m;  // d M / d s-bar
  const int n = fam.n();
  CMat w(2 * n, n);
  w.topRows(n) = db * m * d + om.conjugate() * dm * d;
  w.bottomRows(n) = -dm * d;
  return w;
}

PotentialHessian potential_hessian(const PeriodFamily& fam, const SParameterStencil& stencil, const GridPtr& grid,
                                   const std::vector<std::vector<cplx>>& potential) {
  const int n = grid->n();
  const int d = grid->axes();
  const std::size_t nodes = grid->size();
  std::vector<std::span<const cplx>> spans(potential.begin(), potential.end());
  const StencilDerivatives sd = stencil_derivatives(spans, stencil.h);
  const auto g = lattice_gradient(potential[0], *grid);
  const auto hu = lattice_hessian(potential[0], *grid);
  const auto gs = lattice_gradient(sd.d_s, *grid);
  const auto gsb = lattice_gradient(sd.d_sbar, *grid);
  const CMat w = lift_velocity(fam, stencil.center);
  const CMat ws = lift_velocity_sbar(fam, stencil.center);
  const CMat& jz = grid->dz();
  const CMat& jb = grid->dzbar();
  auto H = [&](int a, int b, std::size_t p) { return hu[static_cast<std::size_t>(a * d + b)][p]; };

  PotentialHessian out;
  out.disagreement = sd.disagreement;
  out.fiber = TensorField(grid, {Slot::down_holo, Slot::down_anti});
  out.mixed_periodic = TensorField(grid, {Slot::down_anti});
  out.mixed_conj = TensorField(grid, {Slot::down_holo});
  out.base = TensorField(grid, {});
  for (int j = 0; j < n; ++j) out.mixed_linear.emplace_back(grid, Variance{Slot::down_anti});

  std::vector<cplx> v(static_cast<std::size_t>(d)), vb(static_cast<std::size_t>(d)), vs(static_cast<std::size_t>(d));
  for (std::size_t p = 0; p < nodes; ++p) {
    const std::vector<double> y = y_coords(*grid, p);
    for (int a = 0; a < d; ++a) {
      cplx acc = 0.0, accs = 0.0;
      for (int j = 0; j < n; ++j) {
        acc += w(a, j) * y[static_cast<std::size_t>(j)];
        accs += ws(a, j) * y[static_cast<std::size_t>(j)];
      }
      v[static_cast<std::size_t>(a)] = acc;
      vb[static_cast<std::size_t>(a)] = std::conj(acc);
      vs[static_cast<std::size_t>(a)] = accs;
    }
    // d_b V_a = W(a, b - n) for y axes.
    auto dv = [&](int a, int b) -> cplx { return b >= n ? w(a, b - n) : cplx{}; };
    for (int al = 0; al < n; ++al)
      for (int be = 0; be < n; ++be) {
        cplx acc = 0.0;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) acc += jz(a, al) * jb(b, be) * H(a, b, p);
        out.fiber.component(static_cast<std::size_t>(al * n + be))[p] = acc;
      }
    for (int be = 0; be < n; ++be) {
      cplx per = 0.0;
      for (int b = 0; b < d; ++b) {
        cplx t = gs[static_cast<std::size_t>(b)][p];
        for (int a = 0; a < d; ++a) t += dv(a, b) * g[static_cast<std::size_t>(a)][p];
        per += jb(b, be) * t;
      }
      out.mixed_periodic.component(static_cast<std::size_t>(be))[p] = per;
      for (int j = 0; j < n; ++j) {
        cplx lin = 0.0;
        for (int b = 0; b < d; ++b)
          for (int a = 0; a < d; ++a) lin += jb(b, be) * w(a, j) * H(a, b, p);
        out.mixed_linear[static_cast<std::size_t>(j)].component(static_cast<std::size_t>(be))[p] = lin;
      }
    }
    for (int al = 0; al < n; ++al) {
      cplx acc = 0.0;
      for (int b = 0; b < d; ++b) {
        cplx t = gsb[static_cast<std::size_t>(b)][p];
        for (int a = 0; a < d; ++a) t += std::conj(dv(a, b)) * g[static_cast<std::size_t>(a)][p] + vb[static_cast<std::size_t>(a)] * H(a, b, p);
        acc += jz(b, al) * t;
      }
      out.mixed_conj.component(static_cast<std::size_t>(al))[p] = acc;
    }
    cplx base = sd.d_ssbar[p];
    for (int a = 0; a < d; ++a) {
      const std::size_t ua = static_cast<std::size_t>(a);
      base += vs[ua] * g[ua][p] + v[ua] * gsb[ua][p] + vb[ua] * gs[ua][p];
      for (int b = 0; b < d; ++b) {
        const std::size_t ub = static_cast<std::size_t>(b);
        base += vb[ub] * dv(a, b) * g[ua][p] + vb[ub] * v[ua] * H(a, b, p);
      }
    }
    out.base.values()[p] = base;
  }
  return out;
}

AdmissibleForm build_admissible(const PeriodFamily& fam, const SParameterStencil& stencil, int grid_points,
                                const BuildOptions& opts) {
  stencil.validate(fam);
  const int n = fam.n();
  std::vector<GridPtr> grids;
  for (int k = 0; k < SParameterStencil::size; ++k) grids.push_back(FiberGrid::make(fam.period(stencil.point(k)), grid_points));

  AdmissibleForm w{fam, stencil, opts.mode, {}, {}, TensorField(grids[0], {Slot::down_anti}), TensorField(grids[0], {}), {}, 0};
  if (opts.mode == Provenance::closed_form) {
    for (const GridPtr& g : grids) w.fibers.push_back(MetricField::flat(g));
  } else {
    struct Solved {
      std::vector<cplx> potential;
      MetricField metric;
      int iterations;
    };
    std::vector<std::future<Solved>> jobs;
    for (int k = 0; k < SParameterStencil::size; ++k) {
      jobs.push_back(std::async(std::launch::async, [&, k] {
        const GridPtr& g = grids[static_cast<std::size_t>(k)];
        const MetricField flat = MetricField::flat(g);
        const TensorField psi = TensorField::scalar(g, evaluate_psi(opts.psi, *g, stencil.offset(k)));
        MetricField reference = flat;
        try {
          reference = corrected_metric(flat, psi);
        } catch (const InvalidMetric& e) {
          throw InvalidMetric(std::string("perturbation makes the reference metric indefinite: ") + e.what());
        }
        const MongeAmpereProblem problem(reference);
        MaSolution sol = solve_ricci_flat(problem, opts.ma);
        TensorField total = psi + sol.phi;
        for (auto& z : total.values()) z = z.real();
        MetricField m = corrected_metric(flat, total);
        return Solved{std::vector<cplx>(total.values().begin(), total.values().end()), std::move(m), sol.iterations};
      }));
    }
    for (auto& j : jobs) {
      Solved s = j.get();
      w.potential.push_back(std::move(s.potential));
      w.fibers.push_back(std::move(s.metric));
      w.ma_iterations = std::max(w.ma_iterations, s.iterations);
    }
  }

  // Standard polarization form under the trivialization.
  const GridPtr& g0 = grids[0];
  const CMat flat = g0->flat_metric();
  const CMat dom = fam.derivative_at(stencil.center);
  for (int j = 0; j < n; ++j) {
    std::vector<cplx> comps(static_cast<std::size_t>(n));
    for (int be = 0; be < n; ++be) {
      cplx acc = 0.0;
      for (int ga = 0; ga < n; ++ga) acc -= dom(ga, j) * flat(ga, be);
      comps[static_cast<std::size_t>(be)] = acc;
    }
    w.mixed_linear.push_back(TensorField::constant(g0, {Slot::down_anti}, comps));
  }
  for (std::size_t p = 0; p < g0->size(); ++p) {
    const std::vector<double> y = y_coords(*g0, p);
    CVec a = CVec::Zero(n);
    for (int al = 0; al < n; ++al)
      for (int j = 0; j < n; ++j) a(al) += dom(al, j) * y[static_cast<std::size_t>(j)];
    w.g_ss.values()[p] = (a.transpose() * flat * a.conjugate())(0, 0);
  }
  if (opts.mode == Provenance::solver_corrected) {
    const PotentialHessian ph = potential_hessian(fam, stencil, g0, w.potential);
    for (int j = 0; j < n; ++j) w.mixed_linear[static_cast<std::size_t>(j)] += ph.mixed_linear[static_cast<std::size_t>(j)];
    w.mixed_periodic += ph.mixed_periodic;
    w.g_ss += ph.base;
    for (auto& z : w.g_ss.values()) z = z.real();
  }

  if (opts.breakage.fiber != 0.0) {
    for (auto& m : w.fibers) {
      TensorField g = m.g();
      TensorField f = cos_x1(m.grid()) * cplx(opts.breakage.fiber);
      for (auto& z : f.values()) z += 1.0;
      g *= f;
      m = MetricField(std::move(g));
    }
  }
  if (opts.breakage.mixed != 0.0) {
    const TensorField c = cos_x1(g0);
    auto dst = w.mixed_periodic.component(0);
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += opts.breakage.mixed * c.values()[p];
  }
  return w;
}

TensorField horizontal_lift(const AdmissibleForm& w) { return raise_negated(w.mixed(), w.metric()); }

TensorField kodaira_spencer(const AdmissibleForm& w) {
  const int n = w.n();
  const MetricField& g = w.metric();
  const FiberGrid& grid = *w.grid();
  const CMat& m = grid.m_matrix();
  // a = sum_j y_j a_j + a_P with periodic a_j, a_P; d_{b-bar} y_j = -M(j, b).
  TensorField out = spectral_derivative(raise_negated(w.mixed_periodic, g), Derivative::anti);
  for (int j = 0; j < n; ++j) {
    const TensorField aj = raise_negated(w.mixed_linear[static_cast<std::size_t>(j)], g);
    const TensorField daj = spectral_derivative(aj, Derivative::anti);
    for (int al = 0; al < n; ++al)
      for (int be = 0; be < n; ++be) {
        auto dst = out.component(static_cast<std::size_t>(al * n + be));
        const auto src = aj.component(static_cast<std::size_t>(al));
        const auto dsrc = daj.component(static_cast<std::size_t>(al * n + be));
        for (std::size_t p = 0; p < dst.size(); ++p)
          dst[p] += -m(j, be) * src[p] + grid.coord(p, n + j) * dsrc[p];
      }
  }
  return out;
}

TensorField phi(const AdmissibleForm& w) {
  const TensorField a = horizontal_lift(w);
  const int n = w.n();
  const MetricField& g = w.metric();
  TensorField out = w.g_ss;
  auto dst = out.values();
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be) {
      const auto gv = g.g().component(static_cast<std::size_t>(al * n + be));
      const auto aa = a.component(static_cast<std::size_t>(al));
      const auto ab = a.component(static_cast<std::size_t>(be));
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] -= aa[p] * std::conj(ab[p]) * gv[p];
    }
  return out;
}

AdmissibleForm normalize_admissible(const AdmissibleForm& w) {
  const cplx h = harmonic_projection(phi(w), w.metric());
  return pollute(w, -h.real());
}

AdmissibleForm pollute(const AdmissibleForm& w, double c) {
  AdmissibleForm out = w;
  for (auto& z : out.g_ss.values()) z += c;
  return out;
}

double perpendicularity_residual(const AdmissibleForm& w) {
  const TensorField a = horizontal_lift(w);
  const TensorField mixed = w.mixed();
  const int n = w.n();
  double r = 0.0;
  for (int ga = 0; ga < n; ++ga) {
    std::vector<cplx> acc(mixed.component(static_cast<std::size_t>(ga)).begin(), mixed.component(static_cast<std::size_t>(ga)).end());
    for (int al = 0; al < n; ++al) {
      const auto gv = w.metric().g().component(static_cast<std::size_t>(al * n + ga));
      const auto av = a.component(static_cast<std::size_t>(al));
      for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += av[p] * gv[p];
    }
    for (cplx z : acc) r = std::max(r, std::abs(z));
  }
  return r;
}

double restriction_residual(const AdmissibleForm& w) {
  double r = 0.0;
  for (int k = 0; k < SParameterStencil::size; ++k) {
    const MetricField& m = w.fibers[static_cast<std::size_t>(k)];
    const CMat flat = flat_metric(w.family.period(w.stencil.point(k)));
    const int n = w.n();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (cplx z : m.g().component(static_cast<std::size_t>(a * n + b))) r = std::max(r, std::abs(z - flat(a, b)));
  }
  return r;
}

double determinant_identity_residual(const AdmissibleForm& w) {
  const TensorField ph = phi(w);
  const TensorField mixed = w.mixed();
  const int n = w.n();
  double r = 0.0;
  CMat b(n + 1, n + 1);
  for (std::size_t p = 0; p < ph.nodes(); ++p) {
    b(0, 0) = w.g_ss.values()[p];
    for (int be = 0; be < n; ++be) {
      b(0, 1 + be) = mixed.component(static_cast<std::size_t>(be))[p];
      b(1 + be, 0) = std::conj(mixed.component(static_cast<std::size_t>(be))[p]);
    }
    b.bottomRightCorner(n, n) = w.metric().at(p);
    r = std::max(r, std::abs(ph.values()[p] * w.metric().det()[p] - b.determinant()));
  }
  return r;
}

double d_closed_residual(const AdmissibleForm& w) {
  const int n = w.n();
  const int d = 2 * n;
  const MetricField& g = w.metric();
  const FiberGrid& grid = *w.grid();
  const std::size_t nodes = grid.size();
  double r = 0.0;
  // Fiber block: d_c g_{a b-bar} symmetric in (a, c).
  const TensorField dg = spectral_derivative(g.g(), Derivative::holo);  // (a, b, c)
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const auto x = dg.component(static_cast<std::size_t>((a * n + b) * n + c));
        const auto y = dg.component(static_cast<std::size_t>((c * n + b) * n + a));
        for (std::size_t p = 0; p < nodes; ++p) r = std::max(r, std::abs(x[p] - y[p]));
      }
  // Fiber-base block.
  const CMat wv = lift_velocity(w.family, w.stencil.center);
  const CMat& m = grid.m_matrix();
  std::vector<TensorField> dl;
  for (const auto& l : w.mixed_linear) dl.push_back(spectral_derivative(l, Derivative::holo));  // (b, a)
  const TensorField dp = spectral_derivative(w.mixed_periodic, Derivative::holo);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const std::size_t c = static_cast<std::size_t>(a * n + b);
      std::vector<std::span<const cplx>> samples;
      for (const auto& f : w.fibers) samples.push_back(f.g().component(c));
      const StencilDerivatives sd = stencil_derivatives(samples, w.stencil.h);
      const auto grad = lattice_gradient(g.g().component(c), grid);
      const auto dpv = dp.component(static_cast<std::size_t>(b * n + a));
      for (std::size_t p = 0; p < nodes; ++p) {
        cplx lhs = sd.d_s[p];
        for (int ax = 0; ax < d; ++ax) {
          cplx vax = 0.0;
          for (int j = 0; j < n; ++j) vax += wv(ax, j) * grid.coord(p, n + j);
          lhs += vax * grad[static_cast<std::size_t>(ax)][p];
        }
        cplx rhs = dpv[p];
        for (int j = 0; j < n; ++j)
          rhs += m(j, a) * w.mixed_linear[static_cast<std::size_t>(j)].component(static_cast<std::size_t>(b))[p] +
                 grid.coord(p, n + j) * dl[static_cast<std::size_t>(j)].component(static_cast<std::size_t>(b * n + a))[p];
        r = std::max(r, std::abs(lhs - rhs));
      }
    }
  return r;
}

}  // namespace cyfam
