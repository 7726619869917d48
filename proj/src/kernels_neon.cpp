#if defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>

#include "drs/kernels.hpp"

namespace drs::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double vsum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double vmax(const double* x, std::size_t n) {
  std::size_t i = 0;
  double m = x[0];
  if (n >= 2) {
    float64x2_t vm = vld1q_f64(x);
    for (i = 2; i + 2 <= n; i += 2) vm = vmaxq_f64(vm, vld1q_f64(x + i));
    m = vmaxvq_f64(vm);
  }
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

void adam_update(double* p, const double* g, double* m, double* v,
                 std::size_t n, double lr, double b1, double b2,
                 double inv_b1c, double inv_b2c, double eps) {
  const float64x2_t vb1 = vdupq_n_f64(b1);
  const float64x2_t vb2 = vdupq_n_f64(b2);
  const float64x2_t v1mb1 = vdupq_n_f64(1.0 - b1);
  const float64x2_t v1mb2 = vdupq_n_f64(1.0 - b2);
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t vib1 = vdupq_n_f64(inv_b1c);
  const float64x2_t vib2 = vdupq_n_f64(inv_b2c);
  const float64x2_t veps = vdupq_n_f64(eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    float64x2_t mi = vld1q_f64(m + i);
    float64x2_t vi = vld1q_f64(v + i);
    mi = vfmaq_f64(vmulq_f64(v1mb1, gi), vb1, mi);
    vi = vfmaq_f64(vmulq_f64(v1mb2, vmulq_f64(gi, gi)), vb2, vi);
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t mhat = vmulq_f64(mi, vib1);
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(vmulq_f64(vi, vib2)), veps);
    float64x2_t pi = vld1q_f64(p + i);
    pi = vsubq_f64(pi, vmulq_f64(vlr, vdivq_f64(mhat, denom)));
    vst1q_f64(p + i, pi);
  }
  if (i < n) {
    scalar::adam_update(p + i, g + i, m + i, v + i, n - i, lr, b1, b2,
                        inv_b1c, inv_b2c, eps);
  }
}

}  // namespace drs::kernels::neon

#endif  // __ARM_NEON
