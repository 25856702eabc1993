#pragma once

// omega~ = omega_X + (c + 1) f^* omega^WP in (z, s) coordinates, and its
// positivity checks.

#include <optional>
#include <vector>

#include "cyfam/curvature.hpp"

namespace cyfam {

/// Bordered coefficient matrices of omega~ at every node of the center fiber.
struct AssembledForm {
  double c = 0.0;
  double wp = 0.0;
  double wp_factor = 1.0;       // c + 1 unless overridden
  double volume = 1.0;
  TensorField phi;              // phi_{s s-bar} of omega_X
  TensorField det_g;            // det g_{a b-bar}
  std::vector<CMat> matrices;   // (n+1) x (n+1), index 0 is the base direction
  double fiber_restriction = 0.0;  // sup |fiber block - g_{a b-bar}|
};

/// Throws ConfigError for c < 0. `wp_factor` replaces c + 1 (0 removes the WP term).
AssembledForm assemble_global_form(const AdmissibleForm& w, double wp, double c,
                                   std::optional<double> wp_factor = std::nullopt);

struct GlobalFormReport {
  double c = 0.0;
  double wp = 0.0;
  double wp_factor = 0.0;
  double min_eigenvalue = 0.0;
  std::size_t argmin_node = 0;
  std::vector<double> node_min_eigenvalues;
  double eq20_margin = 0.0;      // min of phi + factor WP - vol Theta_ss
  double remark1_margin = 0.0;   // min of (phi + factor WP) det g - det g WP
  double bordered_det_residual = 0.0;
  double hermitian_residual = 0.0;
  double fiber_restriction = 0.0;
  bool effective = true;
  bool semidefinite = false;
  bool pass = false;
};

/// Strictly positive minimum eigenvalue passes; a semidefinite result passes
/// only for a non-effective direction (WP = 0). Both density inequalities must
/// hold up to `slack`, the accuracy of the curvature values entering them.
GlobalFormReport positivity_check(const AssembledForm& f, const TensorField& theta_ss, double slack = 1e-8);

/// Minimum over nodes of (phi + factor WP) det g - det g WP.
double remark1_check(const AssembledForm& f);

}  // namespace cyfam
