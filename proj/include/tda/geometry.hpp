#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tda {

inline constexpr double kSpeedOfLight = 299792458.0;

struct RadarGeometry {
  double wavelength = 0.0;         // m
  double slant_range = 0.0;        // m, near-range slant range of column 0
  double incidence = 0.0;          // rad
  double range_spacing = 0.0;      // m
  double azimuth_spacing = 0.0;    // m
  double azimuth_time_step = 0.0;  // s per row

  // X-band tandem defaults: 9.6 GHz, 608015 m, 30 deg, 0.93 x 2.00 m cells,
  // azimuth lines at 7 km/s ground speed.
  static RadarGeometry defaults();

  void validate() const;

  // lambda * R * sin(theta)
  double height_scale() const;
  double slant_range_at(double col) const;
  // Look angle at a column for a flat earth seen from the height implied by
  // slant_range and incidence at column 0.
  double look_angle_at(double col) const;
  // Azimuth time of a row, zero at the scene center row.
  double azimuth_time(std::size_t row, std::size_t rows) const;
};

enum class BaselineMode { Config1 = 1, Config2 = 2, Config3 = 3, Config4 = 4 };

bool is_monostatic(BaselineMode mode);
BaselineMode mode_from_int(int mode);

struct BaselineConfiguration {
  double antenna_baseline = 0.0;   // L1, m
  double satellite_baseline = 0.0; // L2, m
  BaselineMode mode = BaselineMode::Config2;
  void validate() const;
};

enum class InterferogramKind { DualAntenna, DualSatelliteBistatic, DualSatelliteMonostatic };

std::string_view kind_name(InterferogramKind kind);
InterferogramKind kind_from_name(std::string_view name);
bool is_dual_satellite(InterferogramKind kind);
// Multiplier of the orbit-error phase: two-way baseline errors for mono-static pairs.
double orbit_factor(InterferogramKind kind);

// Effective baseline = sign * (physical[primary] - multiplier * physical[secondary]).
// multiplier == 0 marks a physical baseline used directly.
struct BaselineCombination {
  std::size_t primary = 0;
  std::size_t secondary = 0;
  int multiplier = 0;
  int sign = 1;
  bool is_physical() const { return multiplier == 0; }
  double evaluate(std::span<const double> physical) const;
};

struct BaselineSet {
  std::vector<double> physical;
  std::vector<double> effective;
  std::vector<BaselineCombination> combination_map;
  std::size_t links() const { return effective.empty() ? 0 : effective.size() - 1; }
  bool has_pseudo_short() const { return !combination_map.empty() && !combination_map[0].is_physical(); }
};

double wrap(double phase);
double phase_to_height(const RadarGeometry& g, double b_perp, double phase);
double height_to_phase(const RadarGeometry& g, double b_perp, double height);
// Phase per metre of height for a baseline.
double height_phase_factor(const RadarGeometry& g, double b_perp);
double height_ambiguity(const RadarGeometry& g, double b1);
double coherence_to_phase_std(double gamma);
// The Gaussian phase approximation is only trusted for gamma >= 0.9.
bool coherence_approximation_valid(double gamma);

// [B1, B2, B3] for the mode, in the order of the configuration formulas.
std::vector<double> equivalent_baselines(const BaselineConfiguration& cfg);
std::vector<InterferogramKind> interferogram_kinds(BaselineMode mode);

// Shortest baseline chain: B1 is the minimum over the physical baselines and all
// |B_j - i B_k| with 1 <= i <= max_int; the remaining elements are the physical
// baselines. With max_int == 0 the chain is the physical list.
BaselineSet effective_baselines(std::span<const double> physical, int max_int = 5);

// Phase std of each chain element; combinations carry sigma_j^2 + i^2 sigma_k^2.
std::vector<double> chain_phase_std(const BaselineSet& set, std::span<const double> physical_sigma);

struct HelixFormation {
  double horizontal_amplitude = 0.0;  // m
  double vertical_amplitude = 0.0;    // m
  double vertical_phase_offset = 0.0; // rad
};

double helix_perpendicular_baseline(const HelixFormation& f, double arg_of_latitude,
                                    const RadarGeometry& g);

}  // namespace tda
