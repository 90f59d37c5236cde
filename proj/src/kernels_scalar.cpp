#include "tda/kernels.hpp"

#include <cmath>
#include <numbers>

namespace tda::kernels::scalar {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_one(double x) {
  double r = x - std::nearbyint(x / kTwoPi) * kTwoPi;
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}
}  // namespace

void wrap(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = wrap_one(in[i]);
}

void scale(const double* in, double factor, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] * factor;
}

void wrapped_combination(const double* a, const double* b, double m, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = wrap_one(a[i] - m * b[i]);
}

void bootstrap_round(const double* pred, const double* wrapped, double* unwrapped, double* amb,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double k = std::nearbyint((pred[i] - wrapped[i]) / kTwoPi);
    amb[i] = k;
    unwrapped[i] = wrapped[i] + k * kTwoPi;
  }
}

}  // namespace tda::kernels::scalar
