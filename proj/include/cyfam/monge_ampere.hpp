#pragma once

// Fiberwise complex Monge-Ampere solver: finds the potential phi with
// det(g0 + i dd-bar phi) = e^b det g_flat and zero mean.

#include <string>
#include <vector>

#include "cyfam/calculus.hpp"

namespace cyfam {

class MongeAmpereProblem {
 public:
  /// Throws InvalidMetric if the total volume of g0 differs from the flat
  /// volume by more than `volume_tol` (relative).
  explicit MongeAmpereProblem(MetricField reference, double volume_tol = 1e-8);

  const MetricField& reference() const { return reference_; }
  const GridPtr& grid() const { return reference_.grid(); }
  double flat_det() const { return flat_det_; }

 private:
  MetricField reference_;
  double flat_det_;
};

struct MaOptions {
  double tolerance = 1e-11;      // sup-norm of the determinant residual
  int max_iterations = 30;
  double initial_damping = 1.0;  // cap on the first step; doubles every iteration
  double min_step = 1.0 / 1024.0;
  PoissonOptions poisson{1e-12, 500};
};

struct MaIteration {
  int iteration;
  double residual;   // before the step
  double damping;    // accepted step length (0 for the final record)
  double decrement;  // sup |damping * delta|
};

struct MaSolution {
  TensorField phi;
  double b = 0.0;
  int iterations = 0;
  std::vector<MaIteration> trace;
};

/// g0 + i dd-bar phi. Throws InvalidMetric if the result is not positive definite.
MetricField corrected_metric(const MetricField& g0, const TensorField& phi);

/// Damped Newton iteration. Throws SolverFailure when max_iterations is
/// exhausted and StepFailure when the line search cannot keep the metric
/// positive definite.
MaSolution solve_ricci_flat(const MongeAmpereProblem& p, const MaOptions& opts = {});

/// sup |det(g0 + dd-bar phi) - e^b det g_flat| with b from volume matching.
double ma_residual(const TensorField& phi, const MongeAmpereProblem& p);

/// iteration,residual,damping,decrement
std::string trace_csv(const std::vector<MaIteration>& trace);

}  // namespace cyfam
