#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tda {

struct Pixel {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Row-major 2-D array. Rows run along azimuth, columns along range.
template <typename T>
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  T& operator[](Pixel p) { return data[p.row * cols + p.col]; }
  const T& operator[](Pixel p) const { return data[p.row * cols + p.col]; }

  std::size_t size() const { return data.size(); }
  std::size_t index(Pixel p) const { return p.row * cols + p.col; }
  bool contains(Pixel p) const { return p.row < rows && p.col < cols; }
  bool same_shape(const auto& other) const { return rows == other.rows && cols == other.cols; }
};

using Mask = Grid<std::uint8_t>;

inline Mask full_mask(std::size_t rows, std::size_t cols) { return Mask(rows, cols, 1); }

inline std::size_t count_valid(const Mask& m) {
  std::size_t n = 0;
  for (auto v : m.data) n += v ? 1 : 0;
  return n;
}

// Masked-in pixel closest to the grid center; ties go to the lower linear index.
Pixel default_reference_pixel(const Mask& mask);

}  // namespace tda
