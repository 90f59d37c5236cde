#include "tda/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tda/errors.hpp"
#include "tda/random.hpp"

namespace tda {

void HeightField::validate() const {
  if (heights.rows < 2 || heights.cols < 2) throw ValidationError("scene", "dimensions must be at least 2x2");
  if (!mask.same_shape(heights)) throw ValidationError("scene", "mask and heights differ in shape");
  for (std::size_t i = 0; i < heights.size(); ++i)
    if (mask.data[i] && !std::isfinite(heights.data[i]))
      throw ValidationError("scene", "masked-in height at index " + std::to_string(i) + " is not finite");
}

HeightField ramp_scene(std::size_t rows, std::size_t cols, double max_height) {
  if (rows < 2 || cols < 2) throw ValidationError("scene", "dimensions must be at least 2x2");
  if (!(max_height >= 0.0)) throw ValidationError("max_height", "must be non-negative");
  HeightField f(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      f.heights(r, c) = c + 1 == cols ? max_height : max_height * static_cast<double>(c) / (cols - 1);
  return f;
}

HeightField blocks_scene(const HeightField& base, const std::vector<Block>& blocks) {
  HeightField f = base;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    if (blk.rows == 0 || blk.cols == 0 || blk.row0 + blk.rows > f.rows() || blk.col0 + blk.cols > f.cols())
      throw ValidationError("blocks[" + std::to_string(b) + "]", "block outside the grid");
    for (std::size_t r = blk.row0; r < blk.row0 + blk.rows; ++r)
      for (std::size_t c = blk.col0; c < blk.col0 + blk.cols; ++c) f.heights(r, c) += blk.height;
  }
  return f;
}

HeightField canopy_scene(std::size_t rows, std::size_t cols, double mean_height, double jitter_std,
                         double density, std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw ValidationError("scene", "dimensions must be at least 2x2");
  if (!(density > 0.0 && density <= 1.0)) throw ValidationError("density", "must lie in (0, 1]");
  if (!(jitter_std >= 0.0)) throw ValidationError("jitter_std", "must be non-negative");
  if (!(mean_height >= 0.0)) throw ValidationError("mean_height", "must be non-negative");
  HeightField f(rows, cols);
  Rng rng = make_rng(seed, "canopy");
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  std::normal_distribution<double> height(0.0, 1.0);
  for (std::size_t i = 0; i < f.heights.size(); ++i) {
    const bool in = density >= 1.0 || keep(rng) < density;
    // rejection keeps the normal shape above zero; acceptance is at least 1/2
    double h = mean_height + jitter_std * height(rng);
    while (h < 0.0) h = mean_height + jitter_std * height(rng);
    f.mask.data[i] = in ? 1 : 0;
    f.heights.data[i] = in ? h : 0.0;
  }
  return f;
}

double max_height_difference(const HeightField& field) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < field.heights.size(); ++i) {
    if (!field.mask.data[i]) continue;
    lo = std::min(lo, field.heights.data[i]);
    hi = std::max(hi, field.heights.data[i]);
  }
  if (lo > hi) throw ValidationError("scene", "empty mask");
  return hi - lo;
}

}  // namespace tda
