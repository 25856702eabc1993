#include "cyfam/grid.hpp"

#include <cmath>

#include "cyfam/error.hpp"

namespace cyfam {

FiberGrid::FiberGrid(PeriodMatrix omega, int points) : period_(std::move(omega)), points_(points) {
  if (points_ < 8 || points_ % 2 != 0) throw ShapeError("fiber grid needs an even number of points >= 8");
  const int n = period_.n();
  const int d = 2 * n;
  strides_.assign(static_cast<std::size_t>(d), 1);
  for (int a = d - 2; a >= 0; --a)
    strides_[static_cast<std::size_t>(a)] = strides_[static_cast<std::size_t>(a) + 1] * static_cast<std::size_t>(points_);
  size_ = strides_[0] * static_cast<std::size_t>(points_);

  // y = M (z - zbar), x = z - Omega y.
  const CMat& om = period_.omega();
  m_ = (om - om.conjugate()).inverse();
  const CMat id = CMat::Identity(n, n);
  dz_.resize(d, n);
  dzbar_.resize(d, n);
  dz_.topRows(n) = id - om * m_;
  dz_.bottomRows(n) = m_;
  dzbar_.topRows(n) = om * m_;
  dzbar_.bottomRows(n) = -m_;
  flat_ = cyfam::flat_metric(period_);
  density_ = std::pow(2.0, n) * period_.imag().determinant();

  holo_.assign(static_cast<std::size_t>(n), std::vector<cplx>(size_));
  anti_.assign(static_cast<std::size_t>(n), std::vector<cplx>(size_));
  std::vector<double> k(static_cast<std::size_t>(d));
  for (std::size_t mode = 0; mode < size_; ++mode) {
    for (int a = 0; a < d; ++a) k[static_cast<std::size_t>(a)] = mode_wavenumber(mode, a);
    for (int al = 0; al < n; ++al) {
      cplx h = 0.0, b = 0.0;
      for (int a = 0; a < d; ++a) {
        h += k[static_cast<std::size_t>(a)] * dz_(a, al);
        b += k[static_cast<std::size_t>(a)] * dzbar_(a, al);
      }
      holo_[static_cast<std::size_t>(al)][mode] = 2.0 * pi * I * h;
      anti_[static_cast<std::size_t>(al)][mode] = 2.0 * pi * I * b;
    }
  }
  flat_box_ = box_symbol(flat_);
}

std::vector<double> FiberGrid::box_symbol(const CMat& g) const { return operator_symbol(g.inverse()); }

std::vector<double> FiberGrid::operator_symbol(const CMat& gi) const {
  const int n = period_.n();
  std::vector<double> out(size_);
  for (std::size_t mode = 0; mode < size_; ++mode) {
    cplx acc = 0.0;
    for (int al = 0; al < n; ++al)
      for (int be = 0; be < n; ++be)
        acc += gi(be, al) * holo_[static_cast<std::size_t>(al)][mode] * anti_[static_cast<std::size_t>(be)][mode];
    out[mode] = -acc.real();
  }
  return out;
}

double FiberGrid::jacobian_residual() const {
  // z^b = x_b + sum_j Omega_{bj} y_j
  const int n = period_.n();
  const CMat& om = period_.omega();
  const CMat dzdz = dz_.topRows(n) + om * dz_.bottomRows(n);
  const CMat dzdzbar = dzbar_.topRows(n) + om * dzbar_.bottomRows(n);
  const CMat dzbdz = dz_.topRows(n) + om.conjugate() * dz_.bottomRows(n);
  double r = (dzdz - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
  r = std::max(r, dzdzbar.cwiseAbs().maxCoeff());
  r = std::max(r, dzbdz.cwiseAbs().maxCoeff());
  return r;
}

bool FiberGrid::same_shape(const FiberGrid& other) const {
  if (this == &other) return true;
  return points_ == other.points_ && n() == other.n() &&
         (period_.omega() - other.period_.omega()).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace cyfam
