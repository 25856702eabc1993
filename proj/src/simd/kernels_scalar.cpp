#include "cyfam/simd/kernels.hpp"

#include <cmath>

namespace cyfam::simd {
namespace {

// Written out in real arithmetic so the results do not depend on how the
// standard library handles complex multiplication (no NaN recovery path).
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = mul(a[i], b[i]);
}

void cmul_acc(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += mul(a[i], b[i]);
}

void cmulc_acc(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += mul(a[i], std::conj(b[i]));
}

void scale_real(const cplx* a, const double* r, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = {a[i].real() * r[i], a[i].imag() * r[i]};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += mul(alpha, x[i]);
}

cplx weighted_sum(const cplx* a, const double* w, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * w[i];
    im += a[i].imag() * w[i];
  }
  return {re, im};
}

double max_abs(const cplx* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    if (s > m) m = s;
  }
  return std::sqrt(m);
}

}  // namespace

namespace detail {
const KernelTable scalar_table{cmul, cmul_acc, cmulc_acc, scale_real, axpy, weighted_sum, max_abs};
}

}  // namespace cyfam::simd
