#pragma once

// Pointwise complex kernels used by the spectral calculus. Each kernel has a
// scalar reference implementation and vectorized variants (AVX2+FMA on x86-64,
// NEON on aarch64). The variant is chosen once at startup from the CPU
// features; CYFAM_SIMD=scalar|avx2|neon overrides the choice.

#include <complex>
#include <cstddef>
#include <span>

namespace cyfam::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  // out[i] = a[i] * b[i]
  void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // out[i] += a[i] * b[i]
  void (*cmul_acc)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // out[i] += a[i] * conj(b[i])
  void (*cmulc_acc)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // out[i] = a[i] * r[i]
  void (*scale_real)(const cplx* a, const double* r, cplx* out, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  // sum_i a[i] * w[i]
  cplx (*weighted_sum)(const cplx* a, const double* w, std::size_t n);
  // max_i |a[i]|
  double (*max_abs)(const cplx* a, std::size_t n);
};

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);

/// Variant selected for this process.
Isa active_isa();

/// Replaces the active variant; throws std::invalid_argument if unsupported.
void set_active_isa(Isa isa);

const KernelTable& kernels();
const KernelTable& kernels(Isa isa);

namespace detail {
extern const KernelTable scalar_table;
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
}  // namespace detail

// Span conveniences over the active table.
inline void cmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  kernels().cmul(a.data(), b.data(), out.data(), out.size());
}
inline void cmul_acc(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  kernels().cmul_acc(a.data(), b.data(), out.data(), out.size());
}
inline void cmulc_acc(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  kernels().cmulc_acc(a.data(), b.data(), out.data(), out.size());
}
inline void scale_real(std::span<const cplx> a, std::span<const double> r, std::span<cplx> out) {
  kernels().scale_real(a.data(), r.data(), out.data(), out.size());
}
inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  kernels().axpy(alpha, x.data(), y.data(), y.size());
}
inline cplx weighted_sum(std::span<const cplx> a, std::span<const double> w) {
  return kernels().weighted_sum(a.data(), w.data(), a.size());
}
inline double max_abs(std::span<const cplx> a) { return kernels().max_abs(a.data(), a.size()); }

}  // namespace cyfam::simd
