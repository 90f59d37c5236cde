#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "tda/kernels.hpp"

using namespace tda;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> edge_values() {
  std::vector<double> v = {0.0, -0.0, kPi, -kPi, 3 * kPi, -3 * kPi, 2 * kPi, -2 * kPi, -3.5 * kPi,
                           std::nextafter(kPi, 0.0), std::nextafter(kPi, 10.0), std::nextafter(-kPi, 0.0),
                           std::nextafter(-kPi, -10.0), 1e6, -1e6, 12345.678, 1e-300, 0.5, 1.5 * kPi};
  for (int k = -50; k <= 50; ++k) {
    v.push_back(k * kPi);
    v.push_back(k * 2 * kPi + 1e-12);
    v.push_back(k * 2 * kPi - 1e-12);
  }
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-200.0, 200.0);
  for (int i = 0; i < 5000; ++i) v.push_back(u(rng));
  return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar wrap convention") {
  std::vector<double> in = {0.0, 3 * kPi, -3.5 * kPi, kPi, -kPi}, out(in.size());
  kernels::scalar::wrap(in.data(), out.data(), in.size());
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(out[2] == doctest::Approx(0.5 * kPi).epsilon(1e-14));
  CHECK(out[3] == kPi);
  CHECK(out[4] == kPi);
  for (double x : edge_values()) {
    double r;
    kernels::scalar::wrap(&x, &r, 1);
    CHECK(r > -kPi);
    CHECK(r <= kPi);
  }
}

TEST_CASE("avx2 kernels are bit-identical to scalar") {
  if (kernels::detected_isa() != kernels::Isa::Avx2) {
    MESSAGE("AVX2 not available on this CPU; skipping equivalence");
    return;
  }
#if defined(TDA_HAVE_AVX2)
  const auto a = edge_values();
  std::vector<double> b(a.size());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 30.0);
  for (double& x : b) x = nd(rng);
  // odd lengths exercise the scalar tails
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{7}, a.size()}) {
    std::vector<double> s1(n), v1(n), s2(n), v2(n), s3(n), v3(n), s4(n), v4(n);
    kernels::scalar::wrap(a.data(), s1.data(), n);
    kernels::avx2::wrap(a.data(), v1.data(), n);
    CHECK(bits_equal(s1, v1));
    kernels::scalar::scale(a.data(), 10.5, s2.data(), n);
    kernels::avx2::scale(a.data(), 10.5, v2.data(), n);
    CHECK(bits_equal(s2, v2));
    kernels::scalar::wrapped_combination(a.data(), b.data(), 3.0, s3.data(), n);
    kernels::avx2::wrapped_combination(a.data(), b.data(), 3.0, v3.data(), n);
    CHECK(bits_equal(s3, v3));
    kernels::scalar::bootstrap_round(a.data(), b.data(), s3.data(), s4.data(), n);
    kernels::avx2::bootstrap_round(a.data(), b.data(), v3.data(), v4.data(), n);
    CHECK(bits_equal(s3, v3));
    CHECK(bits_equal(s4, v4));
  }
#endif
}

TEST_CASE("dispatch follows the active isa") {
  const auto before = kernels::active_isa();
  CHECK(kernels::set_active_isa(kernels::Isa::Scalar) == kernels::Isa::Scalar);
  std::vector<double> in = {3 * kPi, 1.0}, out(2);
  kernels::wrap(in, out);
  CHECK(out[0] == doctest::Approx(kPi));
  const auto chosen = kernels::set_active_isa(kernels::Isa::Avx2);
  CHECK(chosen == kernels::detected_isa());
  kernels::set_active_isa(before);
  CHECK_THROWS(kernels::wrap(std::span<const double>(in), std::span<double>(out.data(), 1)));
}

TEST_CASE("bootstrap round recovers integer cycles") {
  const std::vector<double> truth = {0.3, 7.0, -20.0, 100.0};
  std::vector<double> wrapped(4), pred(4), un(4), amb(4);
  kernels::scalar::wrap(truth.data(), wrapped.data(), 4);
  for (int i = 0; i < 4; ++i) pred[i] = truth[i] + 0.9;  // within half a cycle
  kernels::bootstrap_round(pred, wrapped, un, amb);
  for (int i = 0; i < 4; ++i) {
    CHECK(un[i] == doctest::Approx(truth[i]).epsilon(1e-12));
    CHECK(amb[i] == std::nearbyint(amb[i]));
  }
}
