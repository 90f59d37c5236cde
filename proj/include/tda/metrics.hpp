#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tda/grid.hpp"
#include "tda/scene.hpp"

namespace tda {

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

struct AccuracyReport {
  double mean_error = 0.0;
  double rmse = 0.0;
  double std = 0.0;  // population std of the errors
  double coverage = 0.0;
  std::size_t matched = 0;
  std::vector<HistogramBin> histogram;
};

struct CompareOptions {
  // Remove estimate(ref) - truth(ref) before computing statistics.
  std::optional<Pixel> reference;
  std::size_t bins = 20;
};

AccuracyReport compare(const HeightField& estimate, const HeightField& truth, const CompareOptions& options = {});

struct FTestResult {
  double f0 = 0.0;
  std::optional<double> critical_value;
  std::optional<bool> reject;
};

FTestResult f_test(double var1, double var2, std::optional<double> critical = std::nullopt);

}  // namespace tda
