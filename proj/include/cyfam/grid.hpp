#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "cyfam/linalg.hpp"
#include "cyfam/torus.hpp"

namespace cyfam {

/// Uniform grid on one torus fiber in lattice coordinates u = (x, y) in [0,1)^{2n},
/// with z = x + Omega y. Axis a < n is x_{a}, axis a >= n is y_{a-n}; nodes are
/// stored row-major with axis 0 slowest, matching the DFT layout.
class FiberGrid {
 public:
  /// `points` must be even and at least 8.
  FiberGrid(PeriodMatrix omega, int points);

  static std::shared_ptr<const FiberGrid> make(PeriodMatrix omega, int points) {
    return std::make_shared<const FiberGrid>(std::move(omega), points);
  }

  int n() const { return period_.n(); }
  int points() const { return points_; }
  int axes() const { return 2 * period_.n(); }
  std::size_t size() const { return size_; }
  const PeriodMatrix& period() const { return period_; }

  int axis_index(std::size_t node, int axis) const {
    return static_cast<int>((node / strides_[static_cast<std::size_t>(axis)]) % static_cast<std::size_t>(points_));
  }
  double coord(std::size_t node, int axis) const {
    return static_cast<double>(axis_index(node, axis)) / points_;
  }
  /// Signed wave number of a DFT index; the Nyquist index maps to 0.
  int wavenumber(int index) const {
    if (2 * index < points_) return index;
    if (2 * index == points_) return 0;
    return index - points_;
  }
  int mode_wavenumber(std::size_t mode, int axis) const { return wavenumber(axis_index(mode, axis)); }

  /// du_a / dz^alpha, a 2n x n matrix (rows x_1..x_n, y_1..y_n).
  const CMat& dz() const { return dz_; }
  /// du_a / dzbar^alpha.
  const CMat& dzbar() const { return dzbar_; }
  /// (Omega - conj Omega)^{-1}.
  const CMat& m_matrix() const { return m_; }

  const CMat& flat_metric() const { return flat_; }

  /// Density of prod_alpha (i dz^alpha ^ dzbar^alpha) with respect to du: 2^n det Im Omega.
  double coordinate_density() const { return density_; }

  /// Fourier symbol of d/dz^alpha: 2 pi i sum_a k_a du_a/dz^alpha.
  std::span<const cplx> holo_symbol(int alpha) const { return holo_[static_cast<std::size_t>(alpha)]; }
  /// Fourier symbol of d/dzbar^alpha.
  std::span<const cplx> anti_symbol(int alpha) const { return anti_[static_cast<std::size_t>(alpha)]; }
  /// Eigenvalues of the flat box operator on each Fourier mode (>= 0).
  std::span<const double> flat_box_symbol() const { return flat_box_; }

  /// Fourier symbol of the box operator of a constant metric g.
  std::vector<double> box_symbol(const CMat& g) const;
  /// Symbol of -c^{b-bar a} d_a d_{b-bar} for constant coefficients c(b, a).
  std::vector<double> operator_symbol(const CMat& c) const;

  /// Largest deviation of the stored Jacobians from d z^b / d z^a = delta, d z^b / d zbar^a = 0.
  double jacobian_residual() const;

  bool same_shape(const FiberGrid& other) const;

 private:
  PeriodMatrix period_;
  int points_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
  CMat m_, dz_, dzbar_, flat_;
  double density_;
  std::vector<std::vector<cplx>> holo_, anti_;
  std::vector<double> flat_box_;
};

using GridPtr = std::shared_ptr<const FiberGrid>;

}  // namespace cyfam
