#include "drs/kernels.hpp"

#include <cmath>

namespace drs::kernels::scalar {

// Four independent accumulators break the FP dependency chain so the
// compiler can keep several adds in flight even without -ffast-math.
double dot(const double* __restrict__ a, const double* __restrict__ b,
           std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += a[i + 0] * b[i + 0];
    acc1 += a[i + 1] * b[i + 1];
    acc2 += a[i + 2] * b[i + 2];
    acc3 += a[i + 3] * b[i + 3];
  }
  double acc = (acc0 + acc1) + (acc2 + acc3);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* __restrict__ x, double* __restrict__ y,
          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double vsum(const double* x, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += x[i + 0];
    acc1 += x[i + 1];
    acc2 += x[i + 2];
    acc3 += x[i + 3];
  }
  double acc = (acc0 + acc1) + (acc2 + acc3);
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double vmax(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

void adam_update(double* __restrict__ p, const double* __restrict__ g,
                 double* __restrict__ m, double* __restrict__ v,
                 std::size_t n, double lr, double b1, double b2,
                 double inv_b1c, double inv_b2c, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g[i];
    m[i] = b1 * m[i] + (1.0 - b1) * gi;
    v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
    p[i] -= lr * (m[i] * inv_b1c) / (std::sqrt(v[i] * inv_b2c) + eps);
  }
}

}  // namespace drs::kernels::scalar
