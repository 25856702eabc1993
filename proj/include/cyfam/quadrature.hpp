#pragma once

#include <functional>
#include <vector>

namespace cyfam {

struct GaussRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule with `points` nodes mapped to [0, 1].
const GaussRule& gauss_legendre01(int points);

/// Integral over the unit cell [0,1)^2 (lattice coordinates) of a periodic
/// function with an integrable logarithmic singularity at the origin.
/// The cell is recentred on the singularity, split into eight triangles with
/// a vertex there, and each triangle is integrated with a Duffy map followed
/// by a cubic radial grading and a `points` x `points` Gauss-Legendre rule.
double integrate_cell_singular(const std::function<double(double, double)>& f, int points = 64);

}  // namespace cyfam
