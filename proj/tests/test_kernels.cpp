#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "drs/kernels.hpp"

namespace k = drs::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

bool close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

}  // namespace

TEST_CASE("scalar reference kernels") {
  std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> b = {2.0, -1.0, 0.5, 0.0, 1.0};
  CHECK(k::scalar::dot(a.data(), b.data(), 5) == doctest::Approx(1.0 * 2 - 2 + 1.5 + 0 + 5));
  CHECK(k::scalar::vsum(a.data(), 5) == doctest::Approx(15.0));
  CHECK(k::scalar::vmax(b.data(), 5) == doctest::Approx(2.0));
  std::vector<double> y = {1.0, 1.0, 1.0, 1.0, 1.0};
  k::scalar::axpy(2.0, a.data(), y.data(), 5);
  CHECK(y[4] == doctest::Approx(11.0));
  k::scalar::scale(0.5, y.data(), 5);
  CHECK(y[0] == doctest::Approx(1.5));
}

#if defined(__x86_64__)
TEST_CASE("avx2 lane matches scalar reference") {
  if (!k::cpu_supports_avx2()) return;
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 9u, 31u, 64u, 257u, 1000u}) {
    auto a = random_vec(rng, n);
    auto b = random_vec(rng, n);
    CHECK(close(k::avx2::dot(a.data(), b.data(), n), k::scalar::dot(a.data(), b.data(), n)));
    CHECK(close(k::avx2::vsum(a.data(), n), k::scalar::vsum(a.data(), n)));
    CHECK(k::avx2::vmax(a.data(), n) == k::scalar::vmax(a.data(), n));

    auto y1 = random_vec(rng, n);
    auto y2 = y1;
    k::avx2::axpy(0.37, a.data(), y1.data(), n);
    k::scalar::axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));

    auto s1 = y1;
    auto s2 = y1;
    k::avx2::scale(-1.25, s1.data(), n);
    k::scalar::scale(-1.25, s2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(s1[i], s2[i]));

    auto p1 = random_vec(rng, n), g = random_vec(rng, n);
    auto m1 = random_vec(rng, n), v1 = random_vec(rng, n);
    for (double& x : v1) x = std::abs(x);
    auto p2 = p1, m2 = m1, v2 = v1;
    k::avx2::adam_update(p1.data(), g.data(), m1.data(), v1.data(), n, 1e-3, 0.9,
                         0.999, 1.1, 1.05, 1e-8);
    k::scalar::adam_update(p2.data(), g.data(), m2.data(), v2.data(), n, 1e-3, 0.9,
                           0.999, 1.1, 1.05, 1e-8);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(close(p1[i], p2[i]));
      CHECK(close(m1[i], m2[i]));
      CHECK(close(v1[i], v2[i]));
    }
  }
}
#endif

TEST_CASE("dispatched lane agrees with scalar") {
  k::select_lane();
  INFO("active lane: ", k::active_lane());
  std::mt19937_64 rng(11);
  auto a = random_vec(rng, 129);
  auto b = random_vec(rng, 129);
  CHECK(close(k::dot(a.data(), b.data(), 129), k::scalar::dot(a.data(), b.data(), 129)));
  CHECK(close(k::vsum(a.data(), 129), k::scalar::vsum(a.data(), 129)));
  CHECK(k::vmax(a.data(), 129) == k::scalar::vmax(a.data(), 129));
}
