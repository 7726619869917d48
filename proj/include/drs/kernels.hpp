#ifndef DRS_KERNELS_HPP_
#define DRS_KERNELS_HPP_

#include <cstddef>
#include <string_view>

// Double-precision vector kernels used by the model's forward/backward and
// optimizer inner loops. Every kernel has a scalar reference implementation
// and (on x86-64) an AVX2+FMA variant; an implementation is selected once at
// startup based on CPU support. DRS_KERNELS=scalar|avx2|neon overrides the
// selection. Lanes are equivalence-tested against the scalar reference.
namespace drs::kernels {

// sum_i a[i]*b[i]
extern double (*dot)(const double* a, const double* b, std::size_t n);
// y[i] += alpha * x[i]
extern void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
// x[i] *= alpha
extern void (*scale)(double alpha, double* x, std::size_t n);
// sum_i x[i]
extern double (*vsum)(const double* x, std::size_t n);
// max_i x[i]; n must be >= 1
extern double (*vmax)(const double* x, std::size_t n);
// Fused Adam update over flat parameter/gradient/moment buffers.
// m <- b1*m + (1-b1)*g; v <- b2*v + (1-b2)*g^2;
// p -= lr * (m*inv_b1c) / (sqrt(v*inv_b2c) + eps)
extern void (*adam_update)(double* p, const double* g, double* m, double* v,
                           std::size_t n, double lr, double b1, double b2,
                           double inv_b1c, double inv_b2c, double eps);

// Name of the lane currently wired into the function pointers.
std::string_view active_lane();

// Re-run selection (honours DRS_KERNELS). Called once automatically before
// main via a static initializer; exposed for tests.
void select_lane();

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double vsum(const double* x, std::size_t n);
double vmax(const double* x, std::size_t n);
void adam_update(double* p, const double* g, double* m, double* v,
                 std::size_t n, double lr, double b1, double b2,
                 double inv_b1c, double inv_b2c, double eps);
}  // namespace scalar

#if defined(__x86_64__)
bool cpu_supports_avx2();
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double vsum(const double* x, std::size_t n);
double vmax(const double* x, std::size_t n);
void adam_update(double* p, const double* g, double* m, double* v,
                 std::size_t n, double lr, double b1, double b2,
                 double inv_b1c, double inv_b2c, double eps);
}  // namespace avx2
#endif

#if defined(__ARM_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double vsum(const double* x, std::size_t n);
double vmax(const double* x, std::size_t n);
void adam_update(double* p, const double* g, double* m, double* v,
                 std::size_t n, double lr, double b1, double b2,
                 double inv_b1c, double inv_b2c, double eps);
}  // namespace neon
#endif

}  // namespace drs::kernels

#endif  // DRS_KERNELS_HPP_
