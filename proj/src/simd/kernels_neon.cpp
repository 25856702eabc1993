#include "cyfam/simd/kernels.hpp"

#if defined(CYFAM_HAVE_NEON)

#include <arm_neon.h>

#include <cmath>

namespace cyfam::simd {
namespace {

// One complex double per register, [re im].
inline float64x2_t mul1v(float64x2_t a, float64x2_t b) {
  const float64x2_t a_re = vdupq_laneq_f64(a, 0);
  const float64x2_t a_im = vdupq_laneq_f64(a, 1);
  const float64x2_t b_sw = vextq_f64(b, b, 1);            // [im re]
  const float64x2_t sign = {-1.0, 1.0};
  return vfmaq_f64(vmulq_f64(a_re, b), vmulq_f64(a_im, b_sw), sign);
}

inline float64x2_t conj1v(float64x2_t b) {
  const float64x2_t sign = {1.0, -1.0};
  return vmulq_f64(b, sign);
}

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) vst1q_f64(dp(out + i), mul1v(vld1q_f64(dp(a + i)), vld1q_f64(dp(b + i))));
}

void cmul_acc(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t p = mul1v(vld1q_f64(dp(a + i)), vld1q_f64(dp(b + i)));
    vst1q_f64(dp(out + i), vaddq_f64(vld1q_f64(dp(out + i)), p));
  }
}

void cmulc_acc(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t p = mul1v(vld1q_f64(dp(a + i)), conj1v(vld1q_f64(dp(b + i))));
    vst1q_f64(dp(out + i), vaddq_f64(vld1q_f64(dp(out + i)), p));
  }
}

void scale_real(const cplx* a, const double* r, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) vst1q_f64(dp(out + i), vmulq_n_f64(vld1q_f64(dp(a + i)), r[i]));
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const float64x2_t av = {alpha.real(), alpha.imag()};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t p = mul1v(av, vld1q_f64(dp(x + i)));
    vst1q_f64(dp(y + i), vaddq_f64(vld1q_f64(dp(y + i)), p));
  }
}

cplx weighted_sum(const cplx* a, const double* w, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_n_f64(acc0, vld1q_f64(dp(a + i)), w[i]);
    acc1 = vfmaq_n_f64(acc1, vld1q_f64(dp(a + i + 1)), w[i + 1]);
  }
  float64x2_t acc = vaddq_f64(acc0, acc1);
  for (; i < n; ++i) acc = vfmaq_n_f64(acc, vld1q_f64(dp(a + i)), w[i]);
  return {vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1)};
}

double max_abs(const cplx* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t v = vld1q_f64(dp(a + i));
    const double s = vaddvq_f64(vmulq_f64(v, v));
    if (s > m) m = s;
  }
  return std::sqrt(m);
}

const KernelTable table{cmul, cmul_acc, cmulc_acc, scale_real, axpy, weighted_sum, max_abs};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &table; }
}

}  // namespace cyfam::simd

#else

namespace cyfam::simd::detail {
const KernelTable* neon_table() { return nullptr; }
}

#endif
