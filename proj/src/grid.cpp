#include "tda/grid.hpp"

#include <limits>

#include "tda/errors.hpp"

namespace tda {

Pixel default_reference_pixel(const Mask& mask) {
  const double cr = 0.5 * (static_cast<double>(mask.rows) - 1.0);
  const double cc = 0.5 * (static_cast<double>(mask.cols) - 1.0);
  double best = std::numeric_limits<double>::infinity();
  Pixel out;
  bool found = false;
  for (std::size_t r = 0; r < mask.rows; ++r) {
    for (std::size_t c = 0; c < mask.cols; ++c) {
      if (!mask(r, c)) continue;
      const double d = (r - cr) * (r - cr) + (c - cc) * (c - cc);
      if (d < best) {
        best = d;
        out = {r, c};
        found = true;
      }
    }
  }
  if (!found) throw ValidationError("mask", "no masked-in pixel");
  return out;
}

}  // namespace tda
