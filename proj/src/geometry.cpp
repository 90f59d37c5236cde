#include "tda/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tda/errors.hpp"
#include "tda/kernels.hpp"

namespace tda {

namespace {
constexpr double kPi = std::numbers::pi;
}

RadarGeometry RadarGeometry::defaults() {
  RadarGeometry g;
  g.wavelength = kSpeedOfLight / 9.6e9;
  g.slant_range = 608015.0;
  g.incidence = 30.0 * kPi / 180.0;
  g.range_spacing = 0.93;
  g.azimuth_spacing = 2.0;
  g.azimuth_time_step = g.azimuth_spacing / 7000.0;
  return g;
}

void RadarGeometry::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) throw ValidationError(name, "must be a finite positive number");
  };
  positive(wavelength, "wavelength");
  positive(slant_range, "slant_range");
  if (!(incidence > 0.0 && incidence < kPi / 2)) throw ValidationError("incidence", "must lie in (0, pi/2)");
  positive(range_spacing, "range_spacing");
  positive(azimuth_spacing, "azimuth_spacing");
  positive(azimuth_time_step, "azimuth_time_step");
}

double RadarGeometry::height_scale() const { return wavelength * slant_range * std::sin(incidence); }

double RadarGeometry::slant_range_at(double col) const { return slant_range + col * range_spacing; }

double RadarGeometry::look_angle_at(double col) const {
  const double platform_height = slant_range * std::cos(incidence);
  return std::acos(platform_height / slant_range_at(col));
}

double RadarGeometry::azimuth_time(std::size_t row, std::size_t rows) const {
  const double center = 0.5 * (static_cast<double>(rows) - 1.0);
  return (static_cast<double>(row) - center) * azimuth_time_step;
}

bool is_monostatic(BaselineMode mode) { return mode == BaselineMode::Config4; }

BaselineMode mode_from_int(int mode) {
  if (mode < 1 || mode > 4) throw ValidationError("mode", "must be 1, 2, 3 or 4");
  return static_cast<BaselineMode>(mode);
}

void BaselineConfiguration::validate() const {
  if (!(std::isfinite(antenna_baseline) && antenna_baseline > 0.0))
    throw ValidationError("antenna_baseline", "must be positive");
  if (!(std::isfinite(satellite_baseline) && satellite_baseline > 0.0))
    throw ValidationError("satellite_baseline", "must be positive");
  mode_from_int(static_cast<int>(mode));
}

std::string_view kind_name(InterferogramKind kind) {
  switch (kind) {
    case InterferogramKind::DualAntenna: return "dual_antenna";
    case InterferogramKind::DualSatelliteBistatic: return "dual_satellite_bistatic";
    case InterferogramKind::DualSatelliteMonostatic: return "dual_satellite_monostatic";
  }
  return "unknown";
}

InterferogramKind kind_from_name(std::string_view name) {
  if (name == "dual_antenna") return InterferogramKind::DualAntenna;
  if (name == "dual_satellite_bistatic") return InterferogramKind::DualSatelliteBistatic;
  if (name == "dual_satellite_monostatic") return InterferogramKind::DualSatelliteMonostatic;
  throw ValidationError("kind", "unknown interferogram kind '" + std::string(name) + "'");
}

bool is_dual_satellite(InterferogramKind kind) { return kind != InterferogramKind::DualAntenna; }

double orbit_factor(InterferogramKind kind) {
  switch (kind) {
    case InterferogramKind::DualAntenna: return 0.0;
    case InterferogramKind::DualSatelliteBistatic: return 1.0;
    case InterferogramKind::DualSatelliteMonostatic: return 2.0;
  }
  return 0.0;
}

double BaselineCombination::evaluate(std::span<const double> physical) const {
  if (is_physical()) return physical[primary];
  return sign * (physical[primary] - multiplier * physical[secondary]);
}

double wrap(double phase) {
  double out;
  kernels::scalar::wrap(&phase, &out, 1);
  return out;
}

double height_phase_factor(const RadarGeometry& g, double b_perp) {
  return 4.0 * kPi * b_perp / g.height_scale();
}

double phase_to_height(const RadarGeometry& g, double b_perp, double phase) {
  if (b_perp == 0.0) throw ValidationError("b_perp", "degenerate baseline");
  return g.height_scale() / (4.0 * kPi * b_perp) * phase;
}

double height_to_phase(const RadarGeometry& g, double b_perp, double height) {
  return height_phase_factor(g, b_perp) * height;
}

double height_ambiguity(const RadarGeometry& g, double b1) {
  if (!(b1 > 0.0)) throw ValidationError("b1", "baseline must be positive");
  return g.height_scale() / (2.0 * b1);
}

double coherence_to_phase_std(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("coherence", "must lie in (0, 1]");
  return std::sqrt((1.0 - gamma * gamma) / (2.0 * gamma * gamma));
}

bool coherence_approximation_valid(double gamma) { return gamma >= 0.9; }

std::vector<double> equivalent_baselines(const BaselineConfiguration& cfg) {
  cfg.validate();
  const double l1 = cfg.antenna_baseline;
  const double l2 = cfg.satellite_baseline;
  switch (cfg.mode) {
    case BaselineMode::Config1: return {l1 / 2, l2 / 2, l2 + l1};
    case BaselineMode::Config2: return {l2 / 2, l2 / 2 + l1, l2 + l1};
    case BaselineMode::Config3: return {l1 + l2 / 2, l2 + l1 / 2, l2 + l1};
    case BaselineMode::Config4: return {l1 / 2, l2 + l1 / 2, l2 + l1};
  }
  throw ValidationError("mode", "unknown mode");
}

std::vector<InterferogramKind> interferogram_kinds(BaselineMode mode) {
  using K = InterferogramKind;
  switch (mode) {
    case BaselineMode::Config1: return {K::DualAntenna, K::DualSatelliteBistatic, K::DualSatelliteBistatic};
    case BaselineMode::Config2:
      return {K::DualSatelliteBistatic, K::DualSatelliteBistatic, K::DualSatelliteBistatic};
    case BaselineMode::Config3:
      return {K::DualSatelliteBistatic, K::DualSatelliteBistatic, K::DualSatelliteBistatic};
    case BaselineMode::Config4:
      return {K::DualAntenna, K::DualSatelliteMonostatic, K::DualSatelliteMonostatic};
  }
  throw ValidationError("mode", "unknown mode");
}

BaselineSet effective_baselines(std::span<const double> physical, int max_int) {
  if (physical.empty()) throw ValidationError("physical", "baseline list is empty");
  if (max_int < 0) throw ValidationError("max_int", "must be non-negative");
  for (std::size_t i = 0; i < physical.size(); ++i) {
    if (!(std::isfinite(physical[i]) && physical[i] > 0.0))
      throw ValidationError("physical", "baselines must be finite and positive");
    if (i > 0 && !(physical[i] > physical[i - 1]))
      throw ValidationError("physical", "baselines must be strictly ascending");
  }

  BaselineSet set;
  set.physical.assign(physical.begin(), physical.end());

  const double tiny = 1e-9 * physical.back();
  double best = physical.front();
  BaselineCombination best_combo{0, 0, 0, 1};
  // Smallest multiplier first; within one multiplier, longer primaries first so
  // that equal lengths resolve to a positive difference.
  for (int i = 1; i <= max_int; ++i) {
    for (std::size_t j = physical.size(); j-- > 0;) {
      for (std::size_t k = 0; k < physical.size(); ++k) {
        if (j == k) continue;
        const double v = physical[j] - i * physical[k];
        const double a = std::abs(v);
        if (a > tiny && a < best) {
          best = a;
          best_combo = BaselineCombination{j, k, i, v < 0 ? -1 : 1};
        }
      }
    }
  }

  if (!best_combo.is_physical()) {
    set.effective.push_back(best_combo.evaluate(physical));
    set.combination_map.push_back(best_combo);
  }
  for (std::size_t j = 0; j < physical.size(); ++j) {
    set.effective.push_back(physical[j]);
    set.combination_map.push_back(BaselineCombination{j, j, 0, 1});
  }
  return set;
}

std::vector<double> chain_phase_std(const BaselineSet& set, std::span<const double> physical_sigma) {
  if (physical_sigma.size() != set.physical.size())
    throw ValidationError("sigma", "one phase std per physical baseline required");
  std::vector<double> out;
  out.reserve(set.combination_map.size());
  for (const auto& c : set.combination_map) {
    if (c.is_physical()) {
      out.push_back(physical_sigma[c.primary]);
    } else {
      const double sj = physical_sigma[c.primary];
      const double sk = physical_sigma[c.secondary];
      out.push_back(std::sqrt(sj * sj + double(c.multiplier) * c.multiplier * sk * sk));
    }
  }
  return out;
}

double helix_perpendicular_baseline(const HelixFormation& f, double u, const RadarGeometry& g) {
  const double cross = f.horizontal_amplitude * std::cos(u);
  const double radial = f.vertical_amplitude * std::sin(u + f.vertical_phase_offset);
  return cross * std::cos(g.incidence) + radial * std::sin(g.incidence);
}

}  // namespace tda
