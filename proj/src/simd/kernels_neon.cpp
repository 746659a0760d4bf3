// NEON kernels for AArch64, where Advanced SIMD is part of the base ISA.

#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace msci::simd {
namespace {

double sum_neon(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(a + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(a + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i];
  return s;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot_neon(const double* a, const double* b, const double* w, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), vld1q_f64(a + i)), vld1q_f64(b + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

double weighted_sq_dev_neon(const double* a, double c, const double* w, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vc);
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), d), d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - c;
    s += w[i] * d * d;
  }
  return s;
}

double weighted_rss_neon(const double* y, const double* f, const double* w, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(y + i), vld1q_f64(f + i));
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), d), d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = y[i] - f[i];
    s += w[i] * d * d;
  }
  return s;
}

double centered_cross_neon(const double* a, double ma, const double* b, double mb, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(ma);
  const float64x2_t vb = vdupq_n_f64(mb);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vsubq_f64(vld1q_f64(a + i), va), vsubq_f64(vld1q_f64(b + i), vb));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
  return s;
}

void affine_neon(const double* in, double* out, std::size_t n, double scale, double shift) {
  const float64x2_t vs = vdupq_n_f64(scale);
  const float64x2_t vt = vdupq_n_f64(shift);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vfmaq_f64(vt, vs, vld1q_f64(in + i)));
  for (; i < n; ++i) out[i] = scale * in[i] + shift;
}

void subtract_neon(const double* y, const double* f, double* r, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(r + i, vsubq_f64(vld1q_f64(y + i), vld1q_f64(f + i)));
  for (; i < n; ++i) r[i] = y[i] - f[i];
}

}  // namespace

const KernelTable kNeonKernels{
    "neon",
    &sum_neon,
    &dot_neon,
    &weighted_dot_neon,
    &weighted_sq_dev_neon,
    &weighted_rss_neon,
    &centered_cross_neon,
    &affine_neon,
    &subtract_neon,
};

}  // namespace msci::simd
