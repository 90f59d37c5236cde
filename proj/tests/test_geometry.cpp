#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tda/errors.hpp"
#include "tda/geometry.hpp"

using namespace tda;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

RadarGeometry table_geometry() {
  RadarGeometry g = RadarGeometry::defaults();
  g.wavelength = 0.031228;
  return g;
}

// Independent enumeration of every |B_j - i B_k| with 1 <= |i| <= max_int.
double brute_force_b1(const std::vector<double>& b, int max_int) {
  double best = *std::min_element(b.begin(), b.end());
  for (int i = -max_int; i <= max_int; ++i) {
    if (i == 0) continue;
    for (double bj : b)
      for (double bk : b) {
        const double v = std::abs(bj - i * bk);
        if (v > 1e-9 * b.back()) best = std::min(best, v);
      }
  }
  return best;
}
}  // namespace

TEST_CASE("wrap examples and idempotence") {
  CHECK(wrap(0.0) == 0.0);
  CHECK(wrap(3 * kPi) == Approx(kPi).epsilon(1e-15));
  CHECK(wrap(-3.5 * kPi) == Approx(0.5 * kPi).epsilon(1e-14));
  CHECK(wrap(-kPi) == kPi);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    const double w = wrap(x);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(wrap(w) == w);
    const double cycles = (x - w) / (2 * kPi);
    CHECK(std::abs(cycles - std::nearbyint(cycles)) < 1e-9);
  }
}

TEST_CASE("phase and height conversion") {
  const auto g = table_geometry();
  CHECK(phase_to_height(g, 15.0, 0.0) == 0.0);
  // lambda R sin(theta) / (2 B) by hand: 0.031228 * 608015 * 0.5 / 30
  CHECK(phase_to_height(g, 15.0, 2 * kPi) == Approx(316.4515).epsilon(1e-5));
  CHECK(height_to_phase(g, 300.0, 1.0) == Approx(0.39710).epsilon(2e-4));
  CHECK(height_to_phase(g, 300.0, 0.0) == 0.0);
  CHECK_THROWS_WITH_AS(phase_to_height(g, 0.0, 1.0), doctest::Contains("degenerate baseline"), ValidationError);
  for (double b : {1.0, 7.5, 15.0, 150.0, 315.0, 1000.0})
    for (double h : {-50.0, 0.1, 3.0, 120.0}) {
      const double back = phase_to_height(g, b, height_to_phase(g, b, h));
      CHECK(std::abs(back - h) <= 1e-12 * std::abs(h));
    }
}

TEST_CASE("height ambiguity") {
  const auto g = table_geometry();
  CHECK(height_ambiguity(g, 7.5) == Approx(632.903).epsilon(1e-5));
  CHECK(height_ambiguity(g, 15.0) == Approx(316.4515).epsilon(1e-5));
  CHECK(height_ambiguity(g, 30.0) == height_ambiguity(g, 15.0) / 2.0);
  CHECK_THROWS_AS(height_ambiguity(g, 0.0), ValidationError);
  CHECK_THROWS_AS(height_ambiguity(g, -1.0), ValidationError);
}

TEST_CASE("coherence to phase std") {
  CHECK(coherence_to_phase_std(1.0) == 0.0);
  CHECK(coherence_to_phase_std(0.99) == Approx(std::sqrt((1 - 0.9801) / (2 * 0.9801))));
  CHECK(coherence_to_phase_std(0.99) == Approx(0.10077).epsilon(1e-3));
  CHECK(coherence_to_phase_std(0.9) == Approx(0.3425).epsilon(1e-3));
  CHECK_THROWS_AS(coherence_to_phase_std(0.0), ValidationError);
  CHECK_THROWS_AS(coherence_to_phase_std(1.01), ValidationError);
  CHECK(coherence_approximation_valid(0.95));
  CHECK_FALSE(coherence_approximation_valid(0.85));
}

TEST_CASE("equivalent baselines per mode") {
  auto eq = [](int mode, double l1, double l2) {
    return equivalent_baselines({l1, l2, mode_from_int(mode)});
  };
  CHECK(eq(2, 15, 300) == std::vector<double>{150, 165, 315});
  CHECK(eq(1, 15, 200) == std::vector<double>{7.5, 100, 215});
  CHECK(eq(4, 15, 100) == std::vector<double>{7.5, 107.5, 115});
  CHECK(eq(3, 15, 150) == std::vector<double>{90, 157.5, 165});
  for (int mode = 1; mode <= 4; ++mode)
    for (double l2 : {20.0, 100.0, 400.0}) {
      const auto b = eq(mode, 15.0, l2);
      CHECK(b[0] < b[1]);
      CHECK(b[1] < b[2]);
    }
  CHECK(interferogram_kinds(BaselineMode::Config4).back() == InterferogramKind::DualSatelliteMonostatic);
  CHECK(interferogram_kinds(BaselineMode::Config1).front() == InterferogramKind::DualAntenna);
  CHECK_THROWS_AS(BaselineConfiguration({0.0, 10.0, BaselineMode::Config1}).validate(), ValidationError);
}

TEST_CASE("effective baselines") {
  SUBCASE("mode 2 chain") {
    const std::vector<double> p = {150, 165, 315};
    const auto set = effective_baselines(p, 3);
    CHECK(set.effective == std::vector<double>{15, 150, 165, 315});
    CHECK(set.has_pseudo_short());
    CHECK(set.effective[0] == brute_force_b1(p, 3));
    for (std::size_t i = 0; i < set.effective.size(); ++i)
      CHECK(set.combination_map[i].evaluate(p) == set.effective[i]);
  }
  SUBCASE("already shortest") {
    const auto set = effective_baselines(std::vector<double>{7.5, 100, 215});
    CHECK(set.effective.front() == 7.5);
    CHECK_FALSE(set.has_pseudo_short());
    CHECK(set.effective.size() == 3);
  }
  SUBCASE("single baseline") {
    const auto set = effective_baselines(std::vector<double>{42.0});
    CHECK(set.effective == std::vector<double>{42.0});
  }
  SUBCASE("max_int zero keeps the physical list") {
    const std::vector<double> p = {150, 165, 315};
    CHECK(effective_baselines(p, 0).effective == p);
  }
  SUBCASE("randomized brute-force agreement") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(1.0, 400.0);
    for (int t = 0; t < 300; ++t) {
      std::vector<double> p = {u(rng), u(rng), u(rng)};
      std::sort(p.begin(), p.end());
      if (p[1] - p[0] < 1e-6 || p[2] - p[1] < 1e-6) continue;
      const auto set = effective_baselines(p, 5);
      CHECK(set.effective.front() == Approx(brute_force_b1(p, 5)).epsilon(1e-12));
      CHECK(set.effective.front() <= p.front());
      CHECK(set.effective.back() == p.back());
      for (std::size_t i = 0; i < set.effective.size(); ++i)
        CHECK(set.combination_map[i].evaluate(p) == set.effective[i]);
    }
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(effective_baselines(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(effective_baselines(std::vector<double>{10, 5}), ValidationError);
  }
}

TEST_CASE("chain phase std inflates combinations") {
  const auto set = effective_baselines(std::vector<double>{150, 165, 315});
  const std::vector<double> s = {0.1, 0.2, 0.3};
  const auto chain = chain_phase_std(set, s);
  REQUIRE(chain.size() == 4);
  const auto& c = set.combination_map[0];
  CHECK(chain[0] == Approx(std::sqrt(s[c.primary] * s[c.primary] + c.multiplier * c.multiplier * s[c.secondary] * s[c.secondary])));
  CHECK(chain[1] == 0.1);
  CHECK(chain[3] == 0.3);
}

TEST_CASE("helix baseline") {
  const auto g = table_geometry();
  HelixFormation f{200.0, 0.0, 0.0};
  CHECK(helix_perpendicular_baseline(f, 0.0, g) == Approx(200.0 * std::cos(kPi / 6)));
  f = {200.0, 300.0, 0.4};
  for (double u : {0.1, 1.0, 2.5}) {
    CHECK(helix_perpendicular_baseline(f, u, g) == Approx(helix_perpendicular_baseline(f, u + 2 * kPi, g)));
  }
  CHECK(std::abs(helix_perpendicular_baseline(f, 0.3, g) - helix_perpendicular_baseline(f, kPi - 0.3, g)) > 1.0);
}

TEST_CASE("geometry validation") {
  RadarGeometry g = RadarGeometry::defaults();
  CHECK_NOTHROW(g.validate());
  g.incidence = kPi / 2;
  CHECK_THROWS_AS(g.validate(), ValidationError);
  g = RadarGeometry::defaults();
  g.range_spacing = 0.0;
  CHECK_THROWS_AS(g.validate(), ValidationError);
  g = RadarGeometry::defaults();
  CHECK(g.azimuth_time(0, 3) == -g.azimuth_time_step);
  CHECK(g.azimuth_time(1, 3) == 0.0);
  CHECK(g.look_angle_at(0.0) == Approx(g.incidence));
}
