#include "cyfam/simd/kernels.hpp"

#if defined(CYFAM_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace cyfam::simd {
namespace {

// Two complex doubles per register, interleaved [re0 im0 re1 im1].
inline __m256d mul2(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);
  const __m256d a_im = _mm256_permute_pd(a, 0xF);
  const __m256d b_sw = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_sw));
}

inline __m256d conj2(__m256d b) {
  const __m256d sign = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  return _mm256_xor_pd(b, sign);
}

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

inline cplx mul1(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(dp(out + i), mul2(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i))));
  }
  for (; i < n; ++i) out[i] = mul1(a[i], b[i]);
}

void cmul_acc(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d p = mul2(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i)));
    _mm256_storeu_pd(dp(out + i), _mm256_add_pd(_mm256_loadu_pd(dp(out + i)), p));
  }
  for (; i < n; ++i) out[i] += mul1(a[i], b[i]);
}

void cmulc_acc(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d p = mul2(_mm256_loadu_pd(dp(a + i)), conj2(_mm256_loadu_pd(dp(b + i))));
    _mm256_storeu_pd(dp(out + i), _mm256_add_pd(_mm256_loadu_pd(dp(out + i)), p));
  }
  for (; i < n; ++i) out[i] += mul1(a[i], std::conj(b[i]));
}

void scale_real(const cplx* a, const double* r, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // [r0 r0 r1 r1]
    const __m128d rr = _mm_loadu_pd(r + i);
    const __m256d rv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(rr), 0x50);
    _mm256_storeu_pd(dp(out + i), _mm256_mul_pd(_mm256_loadu_pd(dp(a + i)), rv));
  }
  for (; i < n; ++i) out[i] = {a[i].real() * r[i], a[i].imag() * r[i]};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d av = _mm256_set_pd(alpha.imag(), alpha.real(), alpha.imag(), alpha.real());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d p = mul2(av, _mm256_loadu_pd(dp(x + i)));
    _mm256_storeu_pd(dp(y + i), _mm256_add_pd(_mm256_loadu_pd(dp(y + i)), p));
  }
  for (; i < n; ++i) y[i] += mul1(alpha, x[i]);
}

cplx weighted_sum(const cplx* a, const double* w, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w01 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0x50);
    const __m256d w23 =
        _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i + 2)), 0x50);
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(dp(a + i)), w01, acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(dp(a + i + 2)), w23, acc1);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double re = lanes[0] + lanes[2];
  double im = lanes[1] + lanes[3];
  for (; i < n; ++i) {
    re += a[i].real() * w[i];
    im += a[i].imag() * w[i];
  }
  return {re, im};
}

double max_abs(const cplx* a, std::size_t n) {
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(dp(a + i));
    const __m256d sq = _mm256_mul_pd(v, v);
    // re^2 + im^2 duplicated into both slots of each complex
    const __m256d s = _mm256_add_pd(sq, _mm256_permute_pd(sq, 0x5));
    best = _mm256_max_pd(best, s);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double m = std::max(lanes[0], lanes[2]);
  for (; i < n; ++i) {
    const double s = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    if (s > m) m = s;
  }
  return std::sqrt(m);
}

const KernelTable table{cmul, cmul_acc, cmulc_acc, scale_real, axpy, weighted_sum, max_abs};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &table; }
}

}  // namespace cyfam::simd

#else

namespace cyfam::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}

#endif
