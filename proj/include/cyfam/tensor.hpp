#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cyfam/grid.hpp"

namespace cyfam {

/// Position and type of one tensor index.
enum class Slot : std::uint8_t { up_holo, down_holo, up_anti, down_anti };
using Variance = std::vector<Slot>;

Slot conjugate(Slot s);
std::string to_string(Slot s);
/// Compact variance label, e.g. "^a_b~" for (up_holo, down_anti).
std::string to_string(const Variance& v);

/// Tensor field sampled on a fiber grid. Components are indexed row-major over
/// the slots, each index ranging over 0..n-1.
class TensorField {
 public:
  TensorField() = default;
  TensorField(GridPtr grid, Variance variance);

  static TensorField scalar(GridPtr grid, std::vector<cplx> values);
  static TensorField scalar(GridPtr grid, cplx value);
  /// Spatially constant field; `components` is row-major over the slots.
  static TensorField constant(GridPtr grid, Variance variance, const std::vector<cplx>& components);

  const GridPtr& grid() const { return grid_; }
  const FiberGrid& fiber() const { return *grid_; }
  const Variance& variance() const { return variance_; }
  int rank() const { return static_cast<int>(variance_.size()); }
  bool is_scalar() const { return variance_.empty(); }
  std::size_t components() const { return data_.size(); }
  std::size_t nodes() const { return grid_ ? grid_->size() : 0; }

  std::span<const cplx> component(std::size_t c) const { return data_[c]; }
  std::span<cplx> component(std::size_t c) { return data_[c]; }
  std::span<const cplx> values() const { return data_.at(0); }
  std::span<cplx> values() { return data_.at(0); }

  std::size_t index_of(std::span<const int> multi) const;
  std::vector<int> multi_of(std::size_t c) const;

  TensorField conj() const;
  /// Real parts of a scalar field.
  std::vector<double> real() const;

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(cplx a);
  /// Pointwise product with a scalar field.
  TensorField& operator*=(const TensorField& scalar_field);
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(TensorField a, cplx s) { return a *= s; }
  friend TensorField operator*(cplx s, TensorField a) { return a *= s; }

  double sup_norm() const;

  void require_same_shape(const TensorField& o) const;

 private:
  GridPtr grid_;
  Variance variance_;
  std::vector<std::vector<cplx>> data_;
};

/// Hermitian metric g_{a b-bar} on a fiber, with cached pointwise inverse
/// (stored as g^{b-bar a} at component (b, a)), determinant and volume weights.
class MetricField {
 public:
  /// Throws InvalidMetric unless every sample is Hermitian within
  /// `hermitian_tol` (relative) and positive definite.
  explicit MetricField(TensorField g, double hermitian_tol = 1e-10);

  static MetricField flat(GridPtr grid);
  static MetricField constant(GridPtr grid, const CMat& g);

  const TensorField& g() const { return g_; }
  const TensorField& inverse() const { return inv_; }
  const GridPtr& grid() const { return g_.grid(); }
  int n() const { return g_.fiber().n(); }
  std::span<const double> det() const { return det_; }
  /// Quadrature weights of the volume form omega^n / n! on the grid nodes.
  std::span<const double> volume_weights() const { return weights_; }
  bool is_constant() const { return constant_; }
  double volume() const;

  CMat at(std::size_t node) const;

 private:
  TensorField g_, inv_;
  std::vector<double> det_, weights_;
  bool constant_ = false;
};

}  // namespace cyfam
