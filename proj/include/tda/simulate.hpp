#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tda/geometry.hpp"
#include "tda/grid.hpp"
#include "tda/scene.hpp"

namespace tda {

struct Interferogram {
  Grid<double> wrapped_phase;  // NaN outside the mask
  double b_perp = 0.0;
  double coherence = 1.0;
  InterferogramKind kind = InterferogramKind::DualAntenna;
  std::vector<double> azimuth_time;  // s, per row
};

struct InterferogramStack {
  std::vector<Interferogram> interferograms;  // ascending b_perp
  RadarGeometry geometry;
  Pixel reference_pixel;
  Mask mask;

  std::size_t rows() const { return mask.rows; }
  std::size_t cols() const { return mask.cols; }
  std::vector<double> baselines() const;
  std::vector<double> phase_std() const;
  void validate() const;
};

struct OrbitErrorParams {
  double delta_bc = 0.0;       // m
  double delta_bc_rate = 0.0;  // m/s
  double delta_bn = 0.0;       // m
  double delta_bn_rate = 0.0;  // m/s
  std::array<double, 4> as_array() const { return {delta_bc, delta_bc_rate, delta_bn, delta_bn_rate}; }
};

struct AtmosphericScreen {
  Grid<double> delay_phase;  // rad
  double spatial_exponent = 8.0 / 3.0;
  double rms = 0.0;
};

using Vec3 = std::array<double, 3>;

// Local frame at the target: x = track, y = cross-track (ground range), z = normal.
struct SatelliteState {
  Vec3 master_position{};  // master antenna phase centre relative to the target
  Vec3 baseline_vector{};  // slave minus master, TCN components
  Vec3 target_unit_los{};  // unit vector from the master towards the target
};

struct RangePartials {
  double d_bc = 0.0;
  double d_bn = 0.0;
};

std::vector<double> sample_phase_noise(double sigma, std::size_t n, std::uint64_t seed);

// Central differences (step 1e-3 m) of the slave range |r_M - B|, evaluated as
// (r+^2 - r-^2) / (r+ + r-) so the difference carries no cancellation error.
RangePartials range_partials(const SatelliteState& state);
// Closed form (B_e - r_M . e) / r_S.
RangePartials range_partials_analytic(const SatelliteState& state);
// Directional derivative of the slave range along a unit vector.
double range_derivative(const SatelliteState& state, const Vec3& direction);

// State of the pixel at column `col` for a perpendicular baseline `b_perp`.
SatelliteState pixel_state(const RadarGeometry& g, double col, double b_perp);
Grid<RangePartials> pixel_partials(const RadarGeometry& g, std::size_t rows, std::size_t cols, double b_perp);

Grid<double> orbit_phase_screen(const RadarGeometry& g, const Grid<RangePartials>& partials,
                                const OrbitErrorParams& params, double factor);

AtmosphericScreen turbulence_screen(std::size_t rows, std::size_t cols, double rms, double exponent,
                                    double outer_scale, std::uint64_t seed);

// Differential delay seen by a bi-static pair: the two receive rays cross a
// turbulent layer at `layer_height` with a horizontal separation set by b_perp.
// The screen holds two-way delay phase; the pair sees half of the difference.
Grid<double> bistatic_path_screen(const AtmosphericScreen& screen, const RadarGeometry& g, double b_perp,
                                  double layer_height);

struct SimulationOptions {
  BaselineConfiguration config;
  std::vector<double> coherence{0.99};  // one shared value or one per interferogram
  std::optional<OrbitErrorParams> orbit;
  std::optional<AtmosphericScreen> atmosphere;  // added to mono-static dual-satellite pairs
  bool bistatic_path_delay = false;             // also add the layer path difference to bi-static pairs
  double layer_height = 1000.0;                 // m
  std::optional<Pixel> reference_pixel;
  std::uint64_t seed = 0;
  int max_int = 5;
};

struct SimulationResult {
  InterferogramStack stack;
  std::vector<Grid<double>> error_phase;  // injected orbit + atmosphere phase per interferogram
  std::vector<std::string> warnings;
  double max_height_difference = 0.0;
  double b1 = 0.0;
  double h_amb_b1 = 0.0;
};

SimulationResult simulate_stack(const HeightField& scene, const RadarGeometry& g, const SimulationOptions& opt);

}  // namespace tda
