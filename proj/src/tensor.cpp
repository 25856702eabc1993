#include "cyfam/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "cyfam/error.hpp"
#include "cyfam/simd/kernels.hpp"

namespace cyfam {

Slot conjugate(Slot s) {
  switch (s) {
    case Slot::up_holo: return Slot::up_anti;
    case Slot::down_holo: return Slot::down_anti;
    case Slot::up_anti: return Slot::up_holo;
    case Slot::down_anti: return Slot::down_holo;
  }
  return s;
}

std::string to_string(Slot s) {
  switch (s) {
    case Slot::up_holo: return "^a";
    case Slot::down_holo: return "_a";
    case Slot::up_anti: return "^a~";
    case Slot::down_anti: return "_a~";
  }
  return "?";
}

std::string to_string(const Variance& v) {
  std::string out;
  for (Slot s : v) out += to_string(s);
  return out.empty() ? "scalar" : out;
}

namespace {

std::size_t ipow(int base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

}  // namespace

TensorField::TensorField(GridPtr grid, Variance variance) : grid_(std::move(grid)), variance_(std::move(variance)) {
  if (!grid_) throw ShapeError("tensor field without grid");
  data_.assign(ipow(grid_->n(), rank()), std::vector<cplx>(grid_->size(), cplx{}));
}

TensorField TensorField::scalar(GridPtr grid, std::vector<cplx> values) {
  TensorField t(std::move(grid), {});
  if (values.size() != t.nodes()) throw ShapeError("scalar samples do not match the grid");
  t.data_[0] = std::move(values);
  return t;
}

TensorField TensorField::scalar(GridPtr grid, cplx value) {
  TensorField t(std::move(grid), {});
  std::fill(t.data_[0].begin(), t.data_[0].end(), value);
  return t;
}

TensorField TensorField::constant(GridPtr grid, Variance variance, const std::vector<cplx>& components) {
  TensorField t(std::move(grid), std::move(variance));
  if (components.size() != t.components()) throw ShapeError("wrong number of constant components");
  for (std::size_t c = 0; c < components.size(); ++c) std::fill(t.data_[c].begin(), t.data_[c].end(), components[c]);
  return t;
}

std::size_t TensorField::index_of(std::span<const int> multi) const {
  if (static_cast<int>(multi.size()) != rank()) throw ShapeError("multi-index rank mismatch");
  const int n = grid_->n();
  std::size_t c = 0;
  for (int i : multi) c = c * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  return c;
}

std::vector<int> TensorField::multi_of(std::size_t c) const {
  const int n = grid_->n();
  std::vector<int> m(variance_.size());
  for (int i = rank() - 1; i >= 0; --i) {
    m[static_cast<std::size_t>(i)] = static_cast<int>(c % static_cast<std::size_t>(n));
    c /= static_cast<std::size_t>(n);
  }
  return m;
}

TensorField TensorField::conj() const {
  Variance v;
  for (Slot s : variance_) v.push_back(conjugate(s));
  TensorField t(grid_, v);
  for (std::size_t c = 0; c < data_.size(); ++c)
    std::transform(data_[c].begin(), data_[c].end(), t.data_[c].begin(), [](cplx z) { return std::conj(z); });
  return t;
}

std::vector<double> TensorField::real() const {
  if (!is_scalar()) throw ShapeError("real() needs a scalar field");
  std::vector<double> r(nodes());
  std::transform(data_[0].begin(), data_[0].end(), r.begin(), [](cplx z) { return z.real(); });
  return r;
}

void TensorField::require_same_shape(const TensorField& o) const {
  if (!grid_ || !o.grid_ || !grid_->same_shape(*o.grid_)) throw ShapeError("tensor fields live on different grids");
  if (variance_ != o.variance_)
    throw ShapeError("variance mismatch: " + to_string(variance_) + " vs " + to_string(o.variance_));
}

TensorField& TensorField::operator+=(const TensorField& o) {
  require_same_shape(o);
  for (std::size_t c = 0; c < data_.size(); ++c) simd::kernels().axpy(1.0, o.data_[c].data(), data_[c].data(), nodes());
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  require_same_shape(o);
  for (std::size_t c = 0; c < data_.size(); ++c) simd::kernels().axpy(-1.0, o.data_[c].data(), data_[c].data(), nodes());
  return *this;
}

TensorField& TensorField::operator*=(cplx a) {
  for (auto& comp : data_)
    for (auto& z : comp) z *= a;
  return *this;
}

TensorField& TensorField::operator*=(const TensorField& s) {
  if (!s.is_scalar()) throw ShapeError("pointwise product needs a scalar factor");
  if (!grid_->same_shape(s.fiber())) throw ShapeError("tensor fields live on different grids");
  for (auto& comp : data_) simd::kernels().cmul(comp.data(), s.data_[0].data(), comp.data(), nodes());
  return *this;
}

double TensorField::sup_norm() const {
  double m = 0.0;
  for (const auto& comp : data_) m = std::max(m, simd::kernels().max_abs(comp.data(), comp.size()));
  return m;
}

MetricField::MetricField(TensorField g, double hermitian_tol) : g_(std::move(g)) {
  if (g_.variance() != Variance{Slot::down_holo, Slot::down_anti}) throw ShapeError("metric must have variance _a_b~");
  const int n = g_.fiber().n();
  const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const std::size_t nodes = g_.nodes();
  inv_ = TensorField(g_.grid(), {Slot::up_anti, Slot::up_holo});
  det_.resize(nodes);
  weights_.resize(nodes);
  constant_ = true;
  std::vector<cplx> buf(nn), ibuf(nn);
  const double cell = g_.fiber().coordinate_density() / static_cast<double>(nodes);
  for (std::size_t p = 0; p < nodes; ++p) {
    double scale = 0.0, asym = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const std::size_t c = static_cast<std::size_t>(a * n + b);
        const std::size_t ct = static_cast<std::size_t>(b * n + a);
        buf[c] = g_.component(c)[p];
        scale = std::max(scale, std::abs(buf[c]));
        asym = std::max(asym, std::abs(buf[c] - std::conj(g_.component(ct)[p])));
        if (p > 0 && buf[c] != g_.component(c)[0]) constant_ = false;
      }
    if (asym > hermitian_tol * (1.0 + scale))
      throw InvalidMetric("metric sample is not Hermitian at node " + std::to_string(p));
    if (!hermitian_inverse_det(buf.data(), n, ibuf.data(), &det_[p]))
      throw InvalidMetric("metric sample is not positive definite at node " + std::to_string(p));
    // g^{b-bar a} g_{a c-bar} = delta, so component (b, a) of the inverse is (G^{-1})_{ba}.
    for (std::size_t c = 0; c < nn; ++c) inv_.component(c)[p] = ibuf[c];
    weights_[p] = det_[p] * cell;
  }
}

MetricField MetricField::flat(GridPtr grid) {
  const CMat g = grid->flat_metric();
  return constant(std::move(grid), g);
}

MetricField MetricField::constant(GridPtr grid, const CMat& g) {
  const int n = grid->n();
  std::vector<cplx> comps;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) comps.push_back(g(a, b));
  return MetricField(TensorField::constant(std::move(grid), {Slot::down_holo, Slot::down_anti}, comps));
}

double MetricField::volume() const {
  double v = 0.0;
  for (double w : weights_) v += w;
  return v;
}

CMat MetricField::at(std::size_t node) const {
  const int n = this->n();
  CMat m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = g_.component(static_cast<std::size_t>(a * n + b))[node];
  return m;
}

}  // namespace cyfam
