#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tda/geometry.hpp"
#include "tda/grid.hpp"
#include "tda/scene.hpp"
#include "tda/simulate.hpp"
#include "tda/unwrap.hpp"

namespace tda {

struct UnwrappedStack {
  std::vector<UnwrappedField> fields;  // ascending b_perp
  std::vector<double> b_perp;
  std::vector<InterferogramKind> kinds;
  std::vector<double> coherence;
  Pixel reference_pixel;
  Mask mask;
  void validate() const;
};

UnwrappedStack make_unwrapped_stack(const InterferogramStack& stack, const std::vector<UnwrappedField>& fields);

enum class EstimationMode { Bistatic, Monostatic };

struct JointModelOptions {
  bool include_orbit = true;
};

// Block-sparse weighted system. Column order of the full matrix: one height per
// masked-in pixel, four orbit parameters (delta_bc, delta_bc_rate, delta_bn,
// delta_bn_rate), then one delay per masked-in pixel except the reference
// (mono-static mode only). Observations are interferogram-major.
struct JointModel {
  EstimationMode mode = EstimationMode::Bistatic;
  bool include_orbit = true;
  std::size_t rows = 0;
  std::size_t cols = 0;
  Pixel reference;
  std::vector<std::size_t> pixels;  // linear indices of masked-in pixels
  std::size_t reference_slot = 0;
  std::size_t interferograms = 0;
  std::vector<double> weight;        // per interferogram, 1/sigma^2
  std::vector<double> height_coeff;  // per interferogram, rad per m
  std::vector<std::uint8_t> delay_row;
  std::vector<double> observations;             // [k * m + slot]
  std::vector<std::array<double, 4>> orbit;     // [k * m + slot], reference-differenced
  bool orbit_rank_deficient = false;

  std::size_t pixel_count() const { return pixels.size(); }
  std::size_t observation_count() const { return interferograms * pixels.size(); }
  std::size_t delay_count() const;
  std::size_t unknown_count() const;

  struct Dense {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;  // row-major
    std::vector<double> y;
    std::vector<double> w;
  };
  // Full matrix for audits of small problems only.
  Dense to_dense() const;
};

JointModel build_joint_model(const UnwrappedStack& stack, const RadarGeometry& g, EstimationMode mode,
                             const JointModelOptions& options = {});

struct EstimateResult {
  HeightField heights;
  OrbitErrorParams orbit;
  std::optional<Grid<double>> delays;
  double residual_rms = 0.0;
  Grid<double> posterior_height_std;
  double condition_indicator = 1.0;
  // solution vector in the JointModel column order
  std::vector<double> solution;
};

// Per-pixel Householder elimination of the height (and delay) unknowns, then a
// column-scaled SVD of the stacked 4-column orbit system, then back-substitution.
EstimateResult solve_joint(const JointModel& model);

EstimateResult estimate_heights_only(const UnwrappedStack& stack, const RadarGeometry& g);

}  // namespace tda
