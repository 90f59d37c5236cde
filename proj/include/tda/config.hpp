#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tda/design.hpp"
#include "tda/estimate.hpp"
#include "tda/geometry.hpp"
#include "tda/scene.hpp"
#include "tda/simulate.hpp"

namespace tda::cli {

inline constexpr const char* kConfigSchema = "tda-experiment/1";

struct SceneSpec {
  std::string generator = "ramp_blocks";  // ramp_blocks | canopy | dem
  std::size_t rows = 128;
  std::size_t cols = 128;
  double max_height = 60.0;
  std::vector<Block> blocks;
  double mean_height = 30.0;
  double jitter_std = 3.0;
  double density = 0.6;
  std::string path;
};

struct AtmosphereSpec {
  double rms = 1.0;
  double exponent = 8.0 / 3.0;
  double outer_scale = 0.0;  // cells; 0 disables the outer-scale roll-off
  double layer_height = 1000.0;
  bool bistatic_path_delay = false;
};

struct DesignSpec {
  DesignSettings settings;
  std::vector<BaselineMode> modes{BaselineMode::Config1, BaselineMode::Config2, BaselineMode::Config3,
                                  BaselineMode::Config4};
  std::vector<double> coherence_sweep;
  bool simplified_comparison = false;
};

struct EstimationSpec {
  EstimationMode mode = EstimationMode::Bistatic;
  bool compensate_orbit = true;
  std::size_t histogram_bins = 20;
};

struct FTestSpec {
  double var1 = 1.0;
  double var2 = 1.0;
  std::optional<double> critical;
};

struct ExperimentConfig {
  RadarGeometry geometry = RadarGeometry::defaults();
  SceneSpec scene;
  BaselineConfiguration configuration{15.0, 300.0, BaselineMode::Config2};
  std::vector<double> coherence{0.99};
  std::optional<Pixel> reference_pixel;
  std::optional<OrbitErrorParams> orbit;
  std::optional<AtmosphereSpec> atmosphere;
  std::size_t residual_window = 9;
  int max_int = 5;
  DesignSpec design;
  EstimationSpec estimation;
  std::optional<FTestSpec> f_test;
  std::size_t trials = 500;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output_dir;
  std::filesystem::path base_dir;  // directory of the config file, for relative paths
};

// Parses and validates every field; unknown keys are rejected. Errors are
// ValidationError with a dotted field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

HeightField build_scene(const ExperimentConfig& cfg);
SimulationOptions simulation_options(const ExperimentConfig& cfg, std::size_t rows, std::size_t cols);

}  // namespace tda::cli
