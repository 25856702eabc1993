#include "cyfam/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "cyfam/error.hpp"
#include "cyfam/fft.hpp"
#include "cyfam/simd/kernels.hpp"

namespace cyfam {

namespace {

using Buf = std::vector<cplx>;

Buf to_spectrum(std::span<const cplx> f, const FiberGrid& grid) {
  Buf out(f.begin(), f.end());
  fft::forward(out, grid.axes(), grid.points());
  return out;
}

void from_spectrum(Buf& f, const FiberGrid& grid) { fft::inverse(f, grid.axes(), grid.points()); }

Variance appended(const Variance& v, Slot s) {
  Variance out = v;
  out.push_back(s);
  return out;
}

std::vector<cplx> lattice_symbol(const FiberGrid& grid, int axis) {
  std::vector<cplx> s(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) s[m] = 2.0 * pi * I * static_cast<double>(grid.mode_wavenumber(m, axis));
  return s;
}

// Gamma^c_{ab} at index (c * n + a) * n + b.
std::vector<Buf> christoffel(const MetricField& g) {
  const int n = g.n();
  const std::size_t nodes = g.g().nodes();
  const TensorField dg = spectral_derivative(g.g(), Derivative::holo);  // (b, d-bar, a)
  std::vector<Buf> gamma(static_cast<std::size_t>(n * n * n), Buf(nodes, cplx{}));
  const auto& k = simd::kernels();
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Buf& out = gamma[static_cast<std::size_t>((c * n + a) * n + b)];
        for (int d = 0; d < n; ++d) {
          const auto inv = g.inverse().component(static_cast<std::size_t>(d * n + c));
          const auto der = dg.component(static_cast<std::size_t>((b * n + d) * n + a));
          k.cmul_acc(inv.data(), der.data(), out.data(), nodes);
        }
      }
  return gamma;
}

enum class PairKind { delta, metric_ab, metric_ba, inverse_ab, inverse_ba };

PairKind classify(Slot sa, Slot sb) {
  using S = Slot;
  if ((sa == S::up_holo && sb == S::down_holo) || (sa == S::down_holo && sb == S::up_holo) ||
      (sa == S::up_anti && sb == S::down_anti) || (sa == S::down_anti && sb == S::up_anti))
    return PairKind::delta;
  if (sa == S::up_holo && sb == S::up_anti) return PairKind::metric_ab;
  if (sa == S::up_anti && sb == S::up_holo) return PairKind::metric_ba;
  if (sa == S::down_anti && sb == S::down_holo) return PairKind::inverse_ab;
  if (sa == S::down_holo && sb == S::down_anti) return PairKind::inverse_ba;
  throw PairingError("cannot contract " + to_string(sa) + " with " + to_string(sb));
}

struct Term {
  std::vector<int> ia, ib;               // index values for the paired slots
  std::vector<std::size_t> factors;      // component indices of metric factors
  std::vector<bool> factor_is_inverse;
};

std::vector<Term> pair_terms(const std::vector<PairKind>& kinds, int n) {
  std::vector<Term> terms{Term{}};
  for (PairKind kind : kinds) {
    std::vector<Term> next;
    for (const Term& t : terms) {
      if (kind == PairKind::delta) {
        for (int i = 0; i < n; ++i) {
          Term u = t;
          u.ia.push_back(i);
          u.ib.push_back(i);
          next.push_back(u);
        }
        continue;
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Term u = t;
          u.ia.push_back(i);
          u.ib.push_back(j);
          const bool ab = kind == PairKind::metric_ab || kind == PairKind::inverse_ab;
          u.factors.push_back(static_cast<std::size_t>(ab ? i * n + j : j * n + i));
          u.factor_is_inverse.push_back(kind == PairKind::inverse_ab || kind == PairKind::inverse_ba);
          next.push_back(u);
        }
    }
    terms = std::move(next);
  }
  return terms;
}

}  // namespace

TensorField spectral_derivative(const TensorField& t, Derivative kind) {
  const FiberGrid& grid = t.fiber();
  const int n = grid.n();
  TensorField out(t.grid(), appended(t.variance(), kind == Derivative::holo ? Slot::down_holo : Slot::down_anti));
  Buf tmp(grid.size());
  for (std::size_t c = 0; c < t.components(); ++c) {
    const Buf spec = to_spectrum(t.component(c), grid);
    for (int g = 0; g < n; ++g) {
      const auto sym = kind == Derivative::holo ? grid.holo_symbol(g) : grid.anti_symbol(g);
      simd::kernels().cmul(spec.data(), sym.data(), tmp.data(), tmp.size());
      from_spectrum(tmp, grid);
      auto dst = out.component(c * static_cast<std::size_t>(n) + static_cast<std::size_t>(g));
      std::copy(tmp.begin(), tmp.end(), dst.begin());
    }
  }
  return out;
}

std::vector<std::vector<cplx>> lattice_gradient(std::span<const cplx> f, const FiberGrid& grid) {
  const Buf spec = to_spectrum(f, grid);
  std::vector<Buf> out;
  for (int a = 0; a < grid.axes(); ++a) {
    const Buf sym = lattice_symbol(grid, a);
    Buf tmp(grid.size());
    simd::kernels().cmul(spec.data(), sym.data(), tmp.data(), tmp.size());
    from_spectrum(tmp, grid);
    out.push_back(std::move(tmp));
  }
  return out;
}

std::vector<std::vector<cplx>> lattice_hessian(std::span<const cplx> f, const FiberGrid& grid) {
  const int d = grid.axes();
  const Buf spec = to_spectrum(f, grid);
  std::vector<Buf> syms;
  for (int a = 0; a < d; ++a) syms.push_back(lattice_symbol(grid, a));
  std::vector<Buf> out(static_cast<std::size_t>(d * d));
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      Buf tmp(grid.size());
      simd::kernels().cmul(spec.data(), syms[static_cast<std::size_t>(a)].data(), tmp.data(), tmp.size());
      simd::kernels().cmul(tmp.data(), syms[static_cast<std::size_t>(b)].data(), tmp.data(), tmp.size());
      from_spectrum(tmp, grid);
      out[static_cast<std::size_t>(b * d + a)] = tmp;
      out[static_cast<std::size_t>(a * d + b)] = std::move(tmp);
    }
  return out;
}

TensorField covariant_derivative(const TensorField& t, const MetricField& g, Derivative kind) {
  TensorField out = spectral_derivative(t, kind);
  if (g.is_constant() || t.is_scalar()) return out;
  if (!t.fiber().same_shape(g.g().fiber())) throw ShapeError("metric and tensor live on different grids");
  const int n = g.n();
  const std::size_t nodes = t.nodes();
  const std::vector<Buf> gamma = christoffel(g);
  const bool holo = kind == Derivative::holo;
  for (std::size_t oc = 0; oc < out.components(); ++oc) {
    const std::vector<int> m = out.multi_of(oc);
    const int dir = m.back();
    std::vector<int> src(m.begin(), m.end() - 1);
    auto dst = out.component(oc);
    for (int slot = 0; slot < t.rank(); ++slot) {
      const Slot s = t.variance()[static_cast<std::size_t>(slot)];
      const bool slot_holo = s == Slot::up_holo || s == Slot::down_holo;
      if (slot_holo != holo) continue;  // mixed-type Christoffel symbols vanish
      const bool up = s == Slot::up_holo || s == Slot::up_anti;
      const int mu = m[static_cast<std::size_t>(slot)];
      for (int nu = 0; nu < n; ++nu) {
        std::vector<int> sm = src;
        sm[static_cast<std::size_t>(slot)] = nu;
        const auto tv = t.component(t.index_of(sm));
        // up: + Gamma^mu_{dir nu} T^nu ; down: - Gamma^nu_{dir mu} T_nu
        const Buf& gm = up ? gamma[static_cast<std::size_t>((mu * n + dir) * n + nu)]
                           : gamma[static_cast<std::size_t>((nu * n + dir) * n + mu)];
        const double sign = up ? 1.0 : -1.0;
        for (std::size_t p = 0; p < nodes; ++p) {
          const cplx gp = holo ? gm[p] : std::conj(gm[p]);
          dst[p] += sign * gp * tv[p];
        }
      }
    }
  }
  return out;
}

TensorField contract(const TensorField& a, const TensorField& b, const std::vector<SlotPair>& pairs,
                     const MetricField& g) {
  if (!a.fiber().same_shape(b.fiber()) || !a.fiber().same_shape(g.g().fiber()))
    throw ShapeError("contraction operands live on different grids");
  const int n = g.n();
  std::vector<bool> used_a(static_cast<std::size_t>(a.rank()), false), used_b(static_cast<std::size_t>(b.rank()), false);
  std::vector<PairKind> kinds;
  for (auto [i, j] : pairs) {
    if (i < 0 || i >= a.rank() || j < 0 || j >= b.rank()) throw PairingError("contraction slot out of range");
    if (used_a[static_cast<std::size_t>(i)] || used_b[static_cast<std::size_t>(j)]) throw PairingError("slot paired twice");
    used_a[static_cast<std::size_t>(i)] = used_b[static_cast<std::size_t>(j)] = true;
    kinds.push_back(classify(a.variance()[static_cast<std::size_t>(i)], b.variance()[static_cast<std::size_t>(j)]));
  }
  Variance ov;
  std::vector<int> free_a, free_b;
  for (int i = 0; i < a.rank(); ++i)
    if (!used_a[static_cast<std::size_t>(i)]) {
      free_a.push_back(i);
      ov.push_back(a.variance()[static_cast<std::size_t>(i)]);
    }
  for (int j = 0; j < b.rank(); ++j)
    if (!used_b[static_cast<std::size_t>(j)]) {
      free_b.push_back(j);
      ov.push_back(b.variance()[static_cast<std::size_t>(j)]);
    }
  TensorField out(a.grid(), ov);
  const std::vector<Term> terms = pair_terms(kinds, n);
  const std::size_t nodes = a.nodes();
  const auto& k = simd::kernels();
  Buf prod(nodes);
  for (std::size_t oc = 0; oc < out.components(); ++oc) {
    const std::vector<int> om = out.multi_of(oc);
    std::vector<int> ma(static_cast<std::size_t>(a.rank())), mb(static_cast<std::size_t>(b.rank()));
    for (std::size_t q = 0; q < free_a.size(); ++q) ma[static_cast<std::size_t>(free_a[q])] = om[q];
    for (std::size_t q = 0; q < free_b.size(); ++q) mb[static_cast<std::size_t>(free_b[q])] = om[free_a.size() + q];
    auto dst = out.component(oc);
    for (const Term& t : terms) {
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        ma[static_cast<std::size_t>(pairs[q].first)] = t.ia[q];
        mb[static_cast<std::size_t>(pairs[q].second)] = t.ib[q];
      }
      const auto av = a.component(a.index_of(ma));
      const auto bv = b.component(b.index_of(mb));
      if (t.factors.empty()) {
        k.cmul_acc(av.data(), bv.data(), dst.data(), nodes);
        continue;
      }
      k.cmul(av.data(), bv.data(), prod.data(), nodes);
      cplx scale = 1.0;
      for (std::size_t f = 0; f < t.factors.size(); ++f) {
        const TensorField& src = t.factor_is_inverse[f] ? g.inverse() : g.g();
        const auto fv = src.component(t.factors[f]);
        if (g.is_constant())
          scale *= fv[0];
        else
          k.cmul(prod.data(), fv.data(), prod.data(), nodes);
      }
      k.axpy(scale, prod.data(), dst.data(), nodes);
    }
  }
  return out;
}

TensorField trace(const TensorField& t, int i, int j, const MetricField& g) {
  if (i == j || i < 0 || j < 0 || i >= t.rank() || j >= t.rank()) throw PairingError("invalid trace slots");
  // Contract against the unit scalar after splitting the pair across two operands.
  const int n = g.n();
  const PairKind kind = classify(t.variance()[static_cast<std::size_t>(i)], t.variance()[static_cast<std::size_t>(j)]);
  Variance ov;
  std::vector<int> free;
  for (int s = 0; s < t.rank(); ++s)
    if (s != i && s != j) {
      free.push_back(s);
      ov.push_back(t.variance()[static_cast<std::size_t>(s)]);
    }
  TensorField out(t.grid(), ov);
  const std::vector<Term> terms = pair_terms({kind}, n);
  const std::size_t nodes = t.nodes();
  Buf prod(nodes);
  for (std::size_t oc = 0; oc < out.components(); ++oc) {
    const std::vector<int> om = out.multi_of(oc);
    std::vector<int> m(static_cast<std::size_t>(t.rank()));
    for (std::size_t q = 0; q < free.size(); ++q) m[static_cast<std::size_t>(free[q])] = om[q];
    auto dst = out.component(oc);
    for (const Term& term : terms) {
      m[static_cast<std::size_t>(i)] = term.ia[0];
      m[static_cast<std::size_t>(j)] = term.ib[0];
      const auto tv = t.component(t.index_of(m));
      if (term.factors.empty()) {
        simd::kernels().axpy(1.0, tv.data(), dst.data(), nodes);
        continue;
      }
      const TensorField& src = term.factor_is_inverse[0] ? g.inverse() : g.g();
      simd::kernels().cmul_acc(tv.data(), src.component(term.factors[0]).data(), dst.data(), nodes);
    }
  }
  return out;
}

TensorField inner_product(const TensorField& a, const TensorField& b, const MetricField& g) {
  if (a.variance() != b.variance()) throw ShapeError("inner product needs equal variances");
  std::vector<SlotPair> pairs;
  for (int i = 0; i < a.rank(); ++i) pairs.emplace_back(i, i);
  return contract(a, b.conj(), pairs, g);
}

cplx integrate(const TensorField& f, const MetricField& g) {
  if (!f.is_scalar()) throw ShapeError("integrate needs a scalar field");
  if (!f.fiber().same_shape(g.g().fiber())) throw ShapeError("integrand and metric live on different grids");
  const auto w = g.volume_weights();
  return simd::kernels().weighted_sum(f.values().data(), w.data(), w.size());
}

cplx harmonic_projection(const TensorField& f, const MetricField& g) { return integrate(f, g) / g.volume(); }

namespace {

// out = sum_{a,b} coeff(b, a) d_a d_{b-bar} f, with coeff given per node.
void second_order(const Buf& spec, const FiberGrid& grid, const TensorField& coeff, bool constant, Buf& out) {
  const int n = grid.n();
  const std::size_t nodes = grid.size();
  std::fill(out.begin(), out.end(), cplx{});
  Buf tmp(nodes);
  const auto& k = simd::kernels();
  if (constant) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const cplx c = coeff.component(static_cast<std::size_t>(b * n + a))[0];
        k.cmul(spec.data(), grid.holo_symbol(a).data(), tmp.data(), nodes);
        k.cmul(tmp.data(), grid.anti_symbol(b).data(), tmp.data(), nodes);
        k.axpy(c, tmp.data(), out.data(), nodes);
      }
    from_spectrum(out, grid);
    return;
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      k.cmul(spec.data(), grid.holo_symbol(a).data(), tmp.data(), nodes);
      k.cmul(tmp.data(), grid.anti_symbol(b).data(), tmp.data(), nodes);
      from_spectrum(tmp, grid);
      k.cmul_acc(tmp.data(), coeff.component(static_cast<std::size_t>(b * n + a)).data(), out.data(), nodes);
    }
}

}  // namespace

TensorField laplacian(const TensorField& f, const MetricField& g) {
  if (!f.is_scalar()) throw ShapeError("laplacian needs a scalar field");
  if (!f.fiber().same_shape(g.g().fiber())) throw ShapeError("function and metric live on different grids");
  const FiberGrid& grid = f.fiber();
  const Buf spec = to_spectrum(f.values(), grid);
  Buf out(grid.size());
  second_order(spec, grid, g.inverse(), g.is_constant(), out);
  for (auto& z : out) z = -z;
  return TensorField::scalar(f.grid(), std::move(out));
}

TensorField poisson_solve(const TensorField& f, const MetricField& g, const PoissonOptions& opts) {
  if (!f.is_scalar()) throw ShapeError("poisson_solve needs a scalar field");
  if (!f.fiber().same_shape(g.g().fiber())) throw ShapeError("function and metric live on different grids");
  const FiberGrid& grid = f.fiber();
  const int n = grid.n();
  const std::size_t nodes = grid.size();
  const double scale = std::max(1.0, f.sup_norm());
  const cplx mean = harmonic_projection(f, g);
  if (std::abs(mean) > 1e-10 * scale)
    throw NotSolvable("right-hand side has harmonic part " + format_complex(mean));
  const auto& k = simd::kernels();

  if (g.is_constant()) {
    const std::vector<double> lam = grid.box_symbol(g.at(0));
    Buf spec = to_spectrum(f.values(), grid);
    for (std::size_t m = 0; m < nodes; ++m) spec[m] = lam[m] > 0.0 ? spec[m] / lam[m] : cplx{};
    from_spectrum(spec, grid);
    return TensorField::scalar(f.grid(), std::move(spec));
  }

  // K u = det g g^{b-bar a} d_a d_{b-bar} u is self-adjoint for Kaehler g; solve K u = -det g f
  // by Richardson iteration preconditioned with the constant-coefficient operator
  // built from the averaged coefficients.
  TensorField coeff = g.inverse();
  std::vector<cplx> det(nodes);
  for (std::size_t p = 0; p < nodes; ++p) det[p] = g.det()[p];
  CMat avg = CMat::Zero(n, n);
  for (std::size_t c = 0; c < coeff.components(); ++c) {
    auto v = coeff.component(c);
    k.cmul(v.data(), det.data(), v.data(), nodes);
    cplx s = 0.0;
    for (cplx z : v) s += z;
    avg(static_cast<int>(c) / n, static_cast<int>(c) % n) = s / static_cast<double>(nodes);
  }
  const std::vector<double> p_sym = grid.operator_symbol(avg);  // -K symbol, >= 0
  Buf rhs(nodes);
  for (std::size_t p = 0; p < nodes; ++p) rhs[p] = -det[p] * f.values()[p];

  Buf u(nodes, cplx{}), ku(nodes), res(nodes);
  std::vector<double> history;
  const double target = opts.tolerance * scale;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const Buf spec_u = to_spectrum(u, grid);
    second_order(spec_u, grid, coeff, false, ku);
    for (std::size_t p = 0; p < nodes; ++p) res[p] = rhs[p] - ku[p];
    fft::forward(res, grid.axes(), grid.points());
    for (std::size_t m = 0; m < nodes; ++m)
      if (!(p_sym[m] > 0.0)) res[m] = 0.0;
    Buf corr = res;
    from_spectrum(res, grid);
    const double r = k.max_abs(res.data(), nodes);
    history.push_back(r);
    if (r <= target) {
      TensorField sol = TensorField::scalar(f.grid(), std::move(u));
      const cplx h = harmonic_projection(sol, g);
      for (auto& z : sol.values()) z -= h;
      return sol;
    }
    for (std::size_t m = 0; m < nodes; ++m) corr[m] = p_sym[m] > 0.0 ? -corr[m] / p_sym[m] : cplx{};
    from_spectrum(corr, grid);
    k.axpy(1.0, corr.data(), u.data(), nodes);
  }
  throw SolverFailure("poisson iteration did not reach " + std::to_string(target), std::move(history));
}

double spectral_tail_fraction(const TensorField& t) {
  const FiberGrid& grid = t.fiber();
  const int cut = grid.points() / 3;
  double tail = 0.0, total = 0.0;
  for (std::size_t c = 0; c < t.components(); ++c) {
    const Buf spec = to_spectrum(t.component(c), grid);
    for (std::size_t m = 0; m < spec.size(); ++m) {
      const double e = std::norm(spec[m]);
      total += e;
      bool high = false;
      for (int a = 0; a < grid.axes(); ++a) high = high || std::abs(grid.mode_wavenumber(m, a)) > cut;
      if (high) tail += e;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace cyfam
