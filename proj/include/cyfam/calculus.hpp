#pragma once

// Spectral calculus on a single fiber: Wirtinger derivatives, Chern covariant
// derivatives, metric contractions, integration, the box operator and its
// inverse on zero-mean functions.

#include <utility>
#include <vector>

#include "cyfam/tensor.hpp"

namespace cyfam {

enum class Derivative { holo, anti };

/// Appends a lower index: d_gamma T (holo) or d_{gamma-bar} T (anti), computed
/// from the truncated Fourier series.
TensorField spectral_derivative(const TensorField& t, Derivative kind);

/// Lattice-coordinate gradient d f / d u_a of a scalar sample vector (2n arrays).
std::vector<std::vector<cplx>> lattice_gradient(std::span<const cplx> f, const FiberGrid& grid);
/// Lattice-coordinate Hessian, entry [a * 2n + b].
std::vector<std::vector<cplx>> lattice_hessian(std::span<const cplx> f, const FiberGrid& grid);

/// Chern covariant derivative, appending a lower index. Christoffel symbols
/// Gamma^c_{ab} = g^{d-bar c} d_a g_{b d-bar} and their conjugates.
TensorField covariant_derivative(const TensorField& t, const MetricField& g, Derivative kind);

/// Index pair (slot in a, slot in b). Opposite positions of the same type
/// contract with delta; same positions of opposite types use the metric or its inverse.
using SlotPair = std::pair<int, int>;

TensorField contract(const TensorField& a, const TensorField& b, const std::vector<SlotPair>& pairs,
                     const MetricField& g);
/// Contraction of two slots of one tensor.
TensorField trace(const TensorField& t, int i, int j, const MetricField& g);
/// Pointwise <a, b> = a . conj(b) with all indices paired.
TensorField inner_product(const TensorField& a, const TensorField& b, const MetricField& g);

/// Integral of a scalar against omega^n / n!.
cplx integrate(const TensorField& f, const MetricField& g);
/// Mean value: integral divided by volume.
cplx harmonic_projection(const TensorField& f, const MetricField& g);

/// box f = -g^{b-bar a} d_a d_{b-bar} f for scalars (nonnegative operator).
TensorField laplacian(const TensorField& f, const MetricField& g);

struct PoissonOptions {
  double tolerance = 1e-11;  // sup-norm residual relative to max(1, sup |f|)
  int max_iterations = 500;
};

/// Solves box_g u = f with zero mean. Throws NotSolvable if f has a nonzero
/// mean, SolverFailure if the preconditioned iteration stalls.
TensorField poisson_solve(const TensorField& f, const MetricField& g, const PoissonOptions& opts = {});

/// Fraction of spectral energy in wave numbers above two thirds of Nyquist.
double spectral_tail_fraction(const TensorField& t);

/// Iterates over all multi-indices in [0, n)^rank.
template <class F>
void for_each_multi(int rank, int n, F&& f) {
  std::vector<int> m(static_cast<std::size_t>(rank), 0);
  while (true) {
    f(static_cast<const std::vector<int>&>(m));
    int i = rank - 1;
    while (i >= 0 && ++m[static_cast<std::size_t>(i)] == n) m[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
  }
}

}  // namespace cyfam
