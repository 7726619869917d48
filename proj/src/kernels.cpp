#include "drs/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace drs::kernels {

double (*dot)(const double*, const double*, std::size_t) = scalar::dot;
void (*axpy)(double, const double*, double*, std::size_t) = scalar::axpy;
void (*scale)(double, double*, std::size_t) = scalar::scale;
double (*vsum)(const double*, std::size_t) = scalar::vsum;
double (*vmax)(const double*, std::size_t) = scalar::vmax;
void (*adam_update)(double*, const double*, double*, double*, std::size_t,
                    double, double, double, double, double, double) =
    scalar::adam_update;

namespace {
const char* g_lane = "scalar";

void wire_scalar() {
  dot = scalar::dot;
  axpy = scalar::axpy;
  scale = scalar::scale;
  vsum = scalar::vsum;
  vmax = scalar::vmax;
  adam_update = scalar::adam_update;
  g_lane = "scalar";
}
}  // namespace

#if defined(__x86_64__)
bool cpu_supports_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

std::string_view active_lane() { return g_lane; }

void select_lane() {
  const char* forced = std::getenv("DRS_KERNELS");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    wire_scalar();
    return;
  }
#if defined(__x86_64__)
  const bool want_avx2 = forced == nullptr || std::strcmp(forced, "avx2") == 0;
  if (want_avx2 && cpu_supports_avx2()) {
    dot = avx2::dot;
    axpy = avx2::axpy;
    scale = avx2::scale;
    vsum = avx2::vsum;
    vmax = avx2::vmax;
    adam_update = avx2::adam_update;
    g_lane = "avx2";
    return;
  }
#endif
#if defined(__ARM_NEON)
  const bool want_neon = forced == nullptr || std::strcmp(forced, "neon") == 0;
  if (want_neon) {
    dot = neon::dot;
    axpy = neon::axpy;
    scale = neon::scale;
    vsum = neon::vsum;
    vmax = neon::vmax;
    adam_update = neon::adam_update;
    g_lane = "neon";
    return;
  }
#endif
  wire_scalar();
}

namespace {
struct LaneInit {
  LaneInit() { select_lane(); }
} g_lane_init;
}  // namespace

}  // namespace drs::kernels
