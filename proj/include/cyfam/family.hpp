#pragma once

// Total-space (1,1)-forms over a base stencil: construction from the standard
// polarization form, optional potential perturbation corrected fiberwise by the
// Monge-Ampere solver, normalization, horizontal lifts and Kodaira-Spencer tensors.

#include <vector>

#include "cyfam/calculus.hpp"
#include "cyfam/monge_ampere.hpp"
#include "cyfam/torus.hpp"

namespace cyfam {

/// Center plus the four axis neighbours at distance h and at h/2:
/// index 0 center, 1..4 = +h, -h, +ih, -ih, 5..8 the same at h/2.
struct SParameterStencil {
  cplx center{0.0, 0.0};
  double h = 1e-2;

  static constexpr int size = 9;
  cplx offset(int k) const;
  cplx point(int k) const { return center + offset(k); }
  /// Throws DomainError if a stencil point leaves the family's disc.
  void validate(const PeriodFamily& fam) const;
};

/// Richardson-extrapolated base derivatives at fixed lattice coordinates.
struct StencilDerivatives {
  std::vector<cplx> d_s, d_sbar, d_ssbar;
  double disagreement = 0.0;  // sup |extrapolated - half-step value| over all three
};

/// `samples[k]` are node values at stencil point k.
StencilDerivatives stencil_derivatives(const std::vector<std::span<const cplx>>& samples, double h);

/// psi(u, t) = sum a (1 + Re(c t)) cos(2 pi k.u + phase), t the offset from the stencil center.
struct PsiMode {
  std::vector<int> k;
  double amplitude = 0.0;
  double phase = 0.0;
  cplx s_coupling{0.0, 0.0};
  bool operator==(const PsiMode&) const = default;
};

struct PerturbationSpec {
  std::vector<PsiMode> modes;
  /// 0.05 cos 2 pi x for n = 1; 0.03 (cos 2 pi x1 + cos 2 pi y2) for n = 2.
  static PerturbationSpec standard(int n);
  bool operator==(const PerturbationSpec&) const = default;
};

std::vector<cplx> evaluate_psi(const PerturbationSpec& spec, const FiberGrid& grid, cplx t);

enum class Provenance { closed_form, solver_corrected };
const char* to_string(Provenance p);

/// Deliberate violations of admissibility, used to exercise the verifiers.
struct Breakage {
  double fiber = 0.0;  // fiber metric scaled by (1 + eps cos 2 pi x1) at every stencil point
  double mixed = 0.0;  // eps cos 2 pi x1 added to g_{s 1-bar}
  bool operator==(const Breakage&) const = default;
};

struct BuildOptions {
  Provenance mode = Provenance::closed_form;
  PerturbationSpec psi;
  MaOptions ma{1e-12, 30, 1.0, 1.0 / 1024.0, {1e-13, 500}};
  Breakage breakage;
};

/// The form omega_X on one stencil neighbourhood. Fiber metrics are kept at
/// every stencil point; the mixed and base components at the center only.
/// The mixed component is g_{s b-bar}(u) = sum_j y_j L_j(u) + P(u) with L_j and P
/// periodic, because the trivialization z = x + Omega(s) y is not lattice invariant.
struct AdmissibleForm {
  PeriodFamily family;
  SParameterStencil stencil;
  Provenance provenance = Provenance::closed_form;
  std::vector<MetricField> fibers;         // one per stencil point
  std::vector<TensorField> mixed_linear;   // L_j, variance _b~
  TensorField mixed_periodic;              // P, variance _b~
  TensorField g_ss;                        // g_{s s-bar} samples on the cell
  std::vector<std::vector<cplx>> potential;  // total potential per stencil point (perturbed mode)
  int ma_iterations = 0;

  int n() const { return family.n(); }
  const MetricField& metric() const { return fibers.front(); }
  const GridPtr& grid() const { return fibers.front().grid(); }
  /// g_{s b-bar} sampled on the unit cell.
  TensorField mixed() const;
};

AdmissibleForm build_admissible(const PeriodFamily& fam, const SParameterStencil& stencil, int grid_points,
                                const BuildOptions& opts = {});

/// Subtracts the pull-back correction with d_s d_sbar u = H(phi_{s s-bar}).
AdmissibleForm normalize_admissible(const AdmissibleForm& w);
/// Adds i dd-bar (u o f) with d_s d_sbar u = c.
AdmissibleForm pollute(const AdmissibleForm& w, double c);

/// a^alpha = -g^{b-bar alpha} g_{s b-bar}, sampled on the cell.
TensorField horizontal_lift(const AdmissibleForm& w);
/// A^alpha_{b-bar} = d_{b-bar} a^alpha.
TensorField kodaira_spencer(const AdmissibleForm& w);
/// phi_{s s-bar} = g_{s s-bar} - a^alpha conj(a^beta) g_{alpha b-bar}.
TensorField phi(const AdmissibleForm& w);

/// sup |g_{s g-bar} + a^alpha g_{alpha g-bar}|.
double perpendicularity_residual(const AdmissibleForm& w);
/// sup over stencil points of |g_{a b-bar} - flat metric of Omega(s)|.
double restriction_residual(const AdmissibleForm& w);
/// sup |phi det g - det [[g_ss, g_sb], [g_as, g_ab]]|.
double determinant_identity_residual(const AdmissibleForm& w);
/// Closedness of omega_X: d_c g_{a b-bar} = d_a g_{c b-bar} on the fiber and
/// d_s g_{a b-bar} = d_a g_{s b-bar} across fiber and base (s-derivative at fixed z).
double d_closed_residual(const AdmissibleForm& w);

/// Components of i dd-bar Phi in (z, s) coordinates at the stencil center for a
/// real potential given at every stencil point in lattice coordinates.
struct PotentialHessian {
  TensorField fiber;                 // _a_b~
  std::vector<TensorField> mixed_linear;  // coefficients of y_j in the (s, b-bar) block
  TensorField mixed_periodic;        // remaining (s, b-bar) block
  TensorField mixed_conj;            // (a, s-bar) block, sampled
  TensorField base;                  // (s, s-bar), sampled
  double disagreement = 0.0;

  TensorField mixed() const;
};

PotentialHessian potential_hessian(const PeriodFamily& fam, const SParameterStencil& stencil, const GridPtr& grid,
                                   const std::vector<std::vector<cplx>>& potential);

/// du/ds at fixed z as a matrix acting on y: V = W y.
CMat lift_velocity(const PeriodFamily& fam, cplx s);
/// d/d s-bar of lift_velocity at fixed u.
CMat lift_velocity_sbar(const PeriodFamily& fam, cplx s);

}  // namespace cyfam
