#include <doctest.h>

#include <cmath>
#include <random>

#include "tda/errors.hpp"
#include "tda/metrics.hpp"

using namespace tda;
using doctest::Approx;

TEST_CASE("identical fields") {
  HeightField a(10, 10, 3.0);
  const auto r = compare(a, a);
  CHECK(r.mean_error == 0.0);
  CHECK(r.rmse == 0.0);
  CHECK(r.std == 0.0);
  CHECK(r.coverage == 1.0);
  CHECK(r.matched == 100);
}

TEST_CASE("reference offset removal") {
  HeightField truth(8, 8, 0.0);
  for (std::size_t i = 0; i < truth.heights.size(); ++i) truth.heights.data[i] = double(i % 7);
  HeightField est = truth;
  for (double& v : est.heights.data) v += 5.0;
  const auto raw = compare(est, truth);
  CHECK(raw.mean_error == Approx(5.0));
  CHECK(raw.rmse == Approx(5.0));
  const auto r = compare(est, truth, {Pixel{3, 3}, 20});
  CHECK(r.mean_error == Approx(0.0).scale(1.0));
  CHECK(r.rmse == Approx(0.0).scale(1.0));
}

TEST_CASE("gaussian errors") {
  const double sigma = 0.7;
  HeightField truth(100, 100, 10.0);
  HeightField est = truth;
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd(0.0, sigma);
  for (double& v : est.heights.data) v += nd(rng);
  const auto r = compare(est, truth, {std::nullopt, 30});
  CHECK(r.rmse == Approx(sigma).epsilon(0.05));
  CHECK(r.rmse * r.rmse == Approx(r.mean_error * r.mean_error + r.std * r.std).epsilon(1e-12));
  std::size_t total = 0;
  for (const auto& b : r.histogram) total += b.count;
  CHECK(total == r.matched);
  CHECK(r.histogram.size() == 30);
  for (std::size_t i = 1; i < r.histogram.size(); ++i) CHECK(r.histogram[i].left == r.histogram[i - 1].right);
}

TEST_CASE("coverage over truth pixels") {
  HeightField truth(4, 5, 1.0);
  truth.mask(0, 0) = 0;
  HeightField est(4, 5, 1.0);
  est.mask(1, 1) = 0;
  est.mask(2, 2) = 0;
  est.mask(0, 0) = 0;
  const auto r = compare(est, truth);
  CHECK(r.matched == 17);
  CHECK(r.coverage == Approx(17.0 / 19.0));
}

TEST_CASE("compare errors") {
  HeightField a(4, 4, 0.0), b(4, 4, 0.0);
  a.mask = Mask(4, 4, 0);
  CHECK_THROWS_AS(compare(a, b), ComputationError);
  HeightField c(4, 5, 0.0);
  CHECK_THROWS_AS(compare(b, c), ValidationError);
  a.mask = Mask(4, 4, 1);
  a.mask(0, 0) = 0;
  CHECK_THROWS_AS(compare(a, b, {Pixel{0, 0}, 20}), ValidationError);
  CHECK(compare(a, b, {Pixel{1, 0}, 20}).matched == 15);
}

TEST_CASE("F test") {
  const auto r = f_test(0.0487, 0.0240);
  CHECK(r.f0 == Approx(2.03).epsilon(0.005));
  CHECK_FALSE(r.reject.has_value());
  const auto s = f_test(0.0240, 0.0487);
  CHECK(s.f0 == Approx(1.0 / r.f0));
  const auto t = f_test(0.0487, 0.0240, 1.5);
  REQUIRE(t.reject.has_value());
  CHECK(*t.reject);
  CHECK(*t.critical_value == 1.5);
  CHECK_FALSE(*f_test(0.0487, 0.0240, 2.5).reject);
  CHECK_THROWS_AS(f_test(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(f_test(1.0, -1.0), ValidationError);
}
