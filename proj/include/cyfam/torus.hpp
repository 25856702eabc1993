#pragma once

// Closed-form geometry of principally polarized complex tori
// X = C^n / (Z^n + Omega Z^n) and of polynomial families Omega(s).

#include <functional>
#include <string>
#include <vector>

#include "cyfam/linalg.hpp"

namespace cyfam {

/// Symmetric complex n x n matrix with positive definite imaginary part.
class PeriodMatrix {
 public:
  /// Throws InvalidPeriod if Omega is not symmetric within `symmetry_tol`
  /// or Im Omega is not positive definite.
  explicit PeriodMatrix(CMat omega, double symmetry_tol = 1e-12);

  int n() const { return static_cast<int>(omega_.rows()); }
  const CMat& omega() const { return omega_; }
  RMat imag() const { return omega_.imag(); }

 private:
  CMat omega_;
};

/// Omega(s) = sum_k coefficients[k] s^k on the disc |s| <= domain_radius.
class PeriodFamily {
 public:
  PeriodFamily(std::string name, std::vector<CMat> coefficients, double domain_radius);

  int n() const { return static_cast<int>(coefficients_.front().rows()); }
  const std::string& name() const { return name_; }
  const std::vector<CMat>& coefficients() const { return coefficients_; }
  double domain_radius() const { return domain_radius_; }

  bool contains(cplx s) const { return std::abs(s) <= domain_radius_ * (1.0 + 1e-12); }

  CMat omega_at(cplx s) const;
  CMat derivative_at(cplx s) const;
  CMat second_derivative_at(cplx s) const;

  /// Checked evaluation: DomainError outside the disc, InvalidPeriod if Omega(s) degenerates.
  PeriodMatrix period(cplx s) const;

  /// The same family reparametrized as t -> Omega(s0 + t), with the same radius.
  PeriodFamily recentered(cplx s0) const;

  /// Samples the closed disc and throws InvalidPeriod where Im Omega fails to be positive.
  void validate_domain() const;

  /// Base point with Omega(s) = tau for one-dimensional fibers (Newton from s = 0).
  cplx solve_for_period(cplx tau) const;

 private:
  std::string name_;
  std::vector<CMat> coefficients_;
  double domain_radius_;
};

struct Preset {
  std::string name;
  std::string description;
  std::function<PeriodFamily()> make;
};

const std::vector<Preset>& presets();

/// Throws ConfigError for unknown names.
PeriodFamily preset_family(const std::string& name);

/// g_{a b-bar} = (Im Omega)^{-1} / 2, the unit-volume flat metric.
CMat flat_metric(const PeriodMatrix& omega);

/// Total volume of the torus under the constant Hermitian metric g, with the
/// convention omega^n / n!.
double flat_volume(const PeriodMatrix& omega, const CMat& g);

/// A^a_{b-bar} = -Omega'(s) (Omega(s) - conj Omega(s))^{-1}.
CMat ks_closed_form(const PeriodFamily& fam, cplx s);

struct KsDerivatives {
  CMat d_s;
  CMat d_sbar;
};

/// Wirtinger derivatives of ks_closed_form in the base parameter.
KsDerivatives ks_closed_form_derivatives(const PeriodFamily& fam, cplx s);

/// L2 norm of the harmonic Kodaira-Spencer class; cross-checked against
/// wp_logdet and throws AccuracyError if they disagree beyond 1e-10.
double wp_closed_form(const PeriodFamily& fam, cplx s);

/// -d_s d_sbar log det Im Omega(s), evaluated analytically.
double wp_logdet(const PeriodFamily& fam, cplx s);

}  // namespace cyfam
