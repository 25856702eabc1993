#pragma once

// Fiberwise Green operator of the flat unit-volume metric: spectral
// application on grids, the kernel via heat-kernel time integration, and a
// lower bound for the kernel.

#include <span>
#include <string>
#include <vector>

#include "cyfam/family.hpp"

namespace cyfam {

struct GreenOptions {
  double t0_scale = 0.05;        // switchover time = t0_scale * largest eigenvalue of Im Omega
  double exponent_cutoff = 40.0;  // terms below e^{-cutoff} are dropped
  double quadrature_tol = 1e-12;  // relative, Gauss-Kronrod in log time
};

class GreenOperator {
 public:
  explicit GreenOperator(PeriodMatrix omega, GreenOptions opts = {});

  const PeriodMatrix& period() const { return period_; }
  int n() const { return period_.n(); }
  double t0() const { return t0_; }
  /// box e^{2 pi i k.u} = 4 pi^2 k^T R k e^{2 pi i k.u}.
  const RMat& form() const { return r_; }
  double eigenvalue(std::span<const int> k) const;
  double lambda_min() const { return lambda_min_; }
  std::size_t mode_count() const { return modes_.size(); }
  std::size_t image_count() const { return images_.size(); }

  /// Heat kernel p_t(u) against the unit-mass measure; throws DomainError for t <= 0.
  double heat_kernel(double t, std::span<const double> u) const;
  double heat_kernel_spectral(double t, std::span<const double> u) const;
  double heat_kernel_images(double t, std::span<const double> u) const;

  struct Value {
    double value;
    double error;  // quadrature error estimate
  };
  /// G(u) = integral over (0, inf) of p_t(u) - 1. Throws SingularPoint on the lattice.
  Value kernel(std::span<const double> u) const;
  double green_kernel(std::span<const double> u) const { return kernel(u).value; }

 private:
  struct Mode {
    std::vector<int> k;
    double lambda;
  };
  PeriodMatrix period_;
  GreenOptions opts_;
  double t0_;
  RMat r_, rinv_;
  double sqrt_det_r_;
  double lambda_min_;
  std::vector<Mode> modes_;
  std::vector<std::vector<int>> images_;

  std::vector<double> reduce(std::span<const double> u) const;
  // v^T R^{-1} v / 4 for the lattice translates v = u + m that matter up to time t_max.
  std::vector<double> image_exponents(std::span<const double> v, double t_max) const;
  double image_sum(const std::vector<double>& exponents, double t) const;
};

/// G(chi) = box^{-1}(chi - H chi) with zero mean.
TensorField green_apply(const TensorField& chi, const MetricField& g);
TensorField green_apply(const GreenOperator& op, const TensorField& chi);

struct LowerBound {
  double c = 0.0;
  double minimum = 0.0;
  std::vector<double> minimizer;
  double margin = 0.0;
  double quadrature_error = 0.0;
  double gradient = 0.0;
  int coarse_points = 0;
};

/// c = -min G + margin, with the minimum located on a coarse grid and refined by
/// Newton's method; margin = 10 x quadrature error + a first/second order
/// continuity term over the last Newton step + a 1e-13 relative roundoff floor.
/// Throws AccuracyError for tol <= 0
/// or when the quadrature error exceeds tol. coarse_points = 0 picks 64 for
/// n = 1 and 8 for n = 2.
LowerBound green_lower_bound(const GreenOperator& op, double tol, int coarse_points = 0);

struct FamilyBound {
  double c = 0.0;
  std::vector<double> per_sample;
};

/// Sampled-uniform bound: the maximum of the per-fiber bounds.
FamilyBound green_family_bound(const std::vector<PeriodMatrix>& samples, double tol, GreenOptions opts = {});

/// sup |phi_{s s-bar} - G(A . conj A)|.
double verify_green_reconstruction(const AdmissibleForm& w, const TensorField& a_ks);

/// Kernel along the diagonal (t, t) and the line (1/2, t), as CSV (n = 1 only).
std::string kernel_profile_csv(const GreenOperator& op, int samples = 64);

}  // namespace cyfam
