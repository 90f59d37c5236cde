#pragma once

namespace tda {

// Standard normal CDF.
double normal_cdf(double z);

// Inverse standard normal CDF, p in (0, 1). Acklam's rational approximation
// (relative error below 1.2e-9) followed by one Halley refinement step.
double normal_quantile(double p);

// Two-sided quantile u with P(|Z| > u) = alpha.
double two_sided_quantile(double alpha);

}  // namespace tda
