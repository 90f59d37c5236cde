#pragma once

#include <cstdint>
#include <vector>

#include "tda/grid.hpp"

namespace tda {

struct HeightField {
  Grid<double> heights;
  Mask mask;

  HeightField() = default;
  HeightField(std::size_t rows, std::size_t cols, double fill = 0.0)
      : heights(rows, cols, fill), mask(rows, cols, 1) {}

  std::size_t rows() const { return heights.rows; }
  std::size_t cols() const { return heights.cols; }
  void validate() const;
};

struct Block {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double height = 0.0;
};

// Linear gradient from 0 at column 0 to max_height at the last column.
HeightField ramp_scene(std::size_t rows, std::size_t cols, double max_height);
HeightField blocks_scene(const HeightField& base, const std::vector<Block>& blocks);
// Sparse scatterers: each cell is kept with probability `density`, heights are
// N(mean, jitter) truncated at zero.
HeightField canopy_scene(std::size_t rows, std::size_t cols, double mean_height, double jitter_std,
                         double density, std::uint64_t seed);
double max_height_difference(const HeightField& field);

}  // namespace tda
