#pragma once

// Closed-form Green kernel of a flat elliptic curve C / (Z + tau Z) built from
// the first Jacobi theta function and the Dedekind eta function.

#include "cyfam/linalg.hpp"

namespace cyfam {

/// log |theta_1(v | tau)| with theta_1(v) = 2 sum_n (-1)^n q^{(n+1/2)^2} sin((2n+1) v), q = e^{i pi tau}.
double log_abs_theta1(cplx v, cplx tau);

/// log |eta(tau)|, eta(tau) = q^{1/12} prod_k (1 - q^{2k}) with q = e^{i pi tau}.
double log_abs_eta(cplx tau);

/// Green kernel G(u) of the unit-volume flat metric on C / (Z + tau Z), with
/// box G = delta_0 - 1 (box = -g^{-1} d d-bar, nonnegative) and zero mean.
///
/// The kernel is taken of the form a1 L(u) + a2 P(u) + c with
///   L(u) = -(1/pi) log |theta_1(pi w | tau) / eta(tau)|,  P(u) = Im(tau) y^2,
///   w = x + tau y. The three constants are fitted by least squares to the
/// defining properties (the PDE away from the origin, lattice periodicity and
/// zero mean), and construction fails unless every fitted equation holds to 1e-9.
class ThetaGreenOracle {
 public:
  explicit ThetaGreenOracle(cplx tau);

  /// Kernel at lattice coordinates (x, y); throws SingularPoint at the origin.
  double operator()(double x, double y) const;

  cplx tau() const { return tau_; }
  double log_weight() const { return a1_; }
  double quadratic_weight() const { return a2_; }
  double offset() const { return c_; }
  double fit_residual() const { return fit_residual_; }

  /// The box operator of the flat unit-volume metric applied to a smooth
  /// function at (x, y), via an eight-point circle mean of radius `radius`
  /// in the z-plane. Exact up to eighth-order terms for harmonic-plus-quadratic
  /// functions.
  template <class F>
  double box(F&& f, double x, double y, double radius = 1e-2) const;

 private:
  double log_part(double x, double y) const;
  double quadratic_part(double /*x*/, double y) const { return tau_.imag() * y * y; }

  cplx tau_;
  double a1_ = 1.0;
  double a2_ = 1.0;
  double c_ = 0.0;
  double fit_residual_ = 0.0;
};

template <class F>
double ThetaGreenOracle::box(F&& f, double x, double y, double radius) const {
  // z = x + tau y; a z-plane displacement d maps to dy = Im d / Im tau, dx = Re d - Re tau dy.
  double mean = 0.0;
  for (int k = 0; k < 8; ++k) {
    const cplx d = radius * std::exp(I * (pi * k / 4.0));
    const double dy = d.imag() / tau_.imag();
    const double dx = d.real() - tau_.real() * dy;
    mean += f(x + dx, y + dy);
  }
  mean /= 8.0;
  const double laplace_r = 4.0 * (mean - f(x, y)) / (radius * radius);
  // box = -g^{-1} d d-bar with g = 1 / (2 Im tau) and d d-bar = Laplacian / 4.
  return -0.5 * tau_.imag() * laplace_r;
}

}  // namespace cyfam
