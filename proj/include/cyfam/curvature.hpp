#pragma once

// Curvature of the relative canonical bundle, the Weil-Petersson metric from
// the L2 formula, and the identities relating them, evaluated as sup-norm residuals.

#include <optional>
#include <string>
#include <vector>

#include "cyfam/family.hpp"

namespace cyfam {

/// Components of Theta = i dd-bar log det g at the stencil center.
struct CurvatureTensor {
  cplx s{0.0, 0.0};
  double h = 0.0;
  TensorField theta_ss;     // scalar
  TensorField theta_sb;     // Theta_{s b-bar}, variance _b~
  TensorField theta_as;     // Theta_{a s-bar}, variance _a
  TensorField theta_fiber;  // Theta_{a b-bar}
  double disagreement = 0.0;
  std::optional<double> analytic_ss;  // -d_s d_sbar log det Im Omega for closed-form data
};

/// Throws AccuracyError when the Richardson disagreement exceeds 10 * richardson_tol.
CurvatureTensor relative_canonical_curvature(const AdmissibleForm& w, double richardson_tol = 1e-6);

/// L2 norm of the Kodaira-Spencer tensor: integral of A . conj(A).
double wp_metric(const AdmissibleForm& w);

/// chi = Theta_ss - a^alpha Theta_{alpha s-bar} - Theta_{s b-bar} conj(a^beta).
TensorField chi(const AdmissibleForm& w, const CurvatureTensor& t);

struct Residual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CurvatureReport {
  cplx s{0.0, 0.0};
  double wp = 0.0;
  std::optional<double> wp_closed;
  double theta_ss = 0.0;  // fiber mean
  std::optional<double> theta_analytic;
  std::vector<Residual> residuals;

  bool pass() const;
  const Residual* find(const std::string& name) const;
};

struct KsResiduals {
  double symmetric = 0.0;      // A lowered is symmetric
  double closed = 0.0;         // d-bar A = 0
  double coclosed = 0.0;       // d-bar^* A = 0
};

struct Lemma2Residuals {
  double holomorphic = 0.0;  // d-bar of Theta_{a s-bar} dz^a
  double eq9 = 0.0;          // Theta_{a s-bar; c}
  double eq10 = 0.0;         // Theta_{s b-bar; d}
};

struct Corollary1Residuals {
  double mixed_sb = 0.0;
  double mixed_as = 0.0;
  double fiber_constancy = 0.0;
};

double verify_first_chern(const AdmissibleForm& w, const CurvatureTensor& t, double wp);
KsResiduals verify_ks(const AdmissibleForm& w, const TensorField& a_ks);
Lemma2Residuals verify_lemma2(const AdmissibleForm& w, const CurvatureTensor& t);
double verify_lemma3(const AdmissibleForm& w, const TensorField& a_ks, const CurvatureTensor& t);
double verify_prop3(const AdmissibleForm& w, const CurvatureTensor& t);
Corollary1Residuals verify_corollary1(const CurvatureTensor& t);
double verify_lemma4(const AdmissibleForm& w, const TensorField& a_ks, const CurvatureTensor& t);
/// Covariant derivatives of constant frame fields and a random constant (1,1)
/// tensor on a flat fiber.
double verify_parallel_tensors(const GridPtr& grid, unsigned seed = 7);

}  // namespace cyfam
