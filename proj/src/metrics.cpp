#include "tda/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tda/errors.hpp"

namespace tda {

AccuracyReport compare(const HeightField& estimate, const HeightField& truth, const CompareOptions& options) {
  if (!estimate.heights.same_shape(truth.heights) || !estimate.mask.same_shape(truth.mask))
    throw ValidationError("estimate", "grids are not aligned");
  double offset = 0.0;
  if (options.reference) {
    const Pixel p = *options.reference;
    if (!truth.mask.contains(p) || !truth.mask[p] || !estimate.mask[p])
      throw ValidationError("reference", "reference pixel outside the mask intersection");
    offset = estimate.heights[p] - truth.heights[p];
  }

  std::vector<double> err;
  std::size_t truth_count = 0;
  for (std::size_t i = 0; i < truth.heights.size(); ++i) {
    if (!truth.mask.data[i]) continue;
    ++truth_count;
    if (estimate.mask.data[i]) err.push_back(estimate.heights.data[i] - truth.heights.data[i] - offset);
  }
  if (err.empty()) throw ComputationError("estimate and truth masks do not intersect");

  AccuracyReport r;
  r.matched = err.size();
  r.coverage = double(err.size()) / double(truth_count);
  const double n = double(err.size());
  double sum = 0.0, sum2 = 0.0;
  for (double e : err) {
    sum += e;
    sum2 += e * e;
  }
  r.mean_error = sum / n;
  r.rmse = std::sqrt(sum2 / n);
  double dev = 0.0;
  for (double e : err) dev += (e - r.mean_error) * (e - r.mean_error);
  r.std = std::sqrt(dev / n);

  const std::size_t bins = std::max<std::size_t>(1, options.bins);
  const auto [lo_it, hi_it] = std::minmax_element(err.begin(), err.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / double(bins);
  r.histogram.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    r.histogram[b].left = lo + width * double(b);
    r.histogram[b].right = b + 1 == bins ? hi : lo + width * double(b + 1);
  }
  for (double e : err) {
    auto b = static_cast<std::size_t>((e - lo) / width);
    ++r.histogram[std::min(b, bins - 1)].count;
  }
  return r;
}

FTestResult f_test(double var1, double var2, std::optional<double> critical) {
  if (!(var1 > 0.0)) throw ValidationError("var1", "variance must be positive");
  if (!(var2 > 0.0)) throw ValidationError("var2", "variance must be positive");
  FTestResult r;
  r.f0 = var1 / var2;
  if (critical) {
    if (!(*critical > 0.0)) throw ValidationError("critical", "critical value must be positive");
    r.critical_value = critical;
    r.reject = r.f0 > *critical;
  }
  return r;
}

}  // namespace tda
