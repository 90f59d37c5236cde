#pragma once

#include <cstddef>
#include <vector>

#include "tda/geometry.hpp"
#include "tda/grid.hpp"
#include "tda/scene.hpp"
#include "tda/simulate.hpp"

namespace tda {

struct UnwrappedField {
  Grid<double> phase;  // rad, zero at the reference pixel, NaN outside the mask
  Pixel reference_pixel;
  std::size_t residue_count = 0;
  Mask mask;
  Mask flagged;  // cells unwrapped from a seed other than the reference pixel
};

struct AmbiguityField {
  Grid<int> ambiguities;
};

enum class DisconnectedPolicy { Error, Flag };

struct SpatialUnwrapOptions {
  DisconnectedPolicy disconnected = DisconnectedPolicy::Error;
};

// Number of 2x2 loops (all four cells valid) with non-zero wrapped circulation.
std::size_t count_residues(const Grid<double>& wrapped, const Mask& mask);

// Quality-guided flood fill. Quality is the phase-derivative variance over a
// 3x3 window; the lowest-variance frontier pixel is integrated next.
UnwrappedField spatial_unwrap(const Grid<double>& wrapped, const Mask& mask, Pixel reference,
                              const SpatialUnwrapOptions& options = {});

struct BootstrapOptions {
  // Side of the square window used to low-pass the bootstrap residual before it
  // is spatially unwrapped. 1 unwraps the raw residual.
  std::size_t residual_window = 9;
};

struct LinkReport {
  double b_lower = 0.0;
  double b_higher = 0.0;
  double residual_std = 0.0;      // robust std of the re-wrapped bootstrap residual
  double failure_fraction = 0.0;  // expected fraction of pixels with a wrong ambiguity
  std::size_t residue_count = 0;  // residues of the smoothed residual field
};

struct BootstrapResult {
  AmbiguityField ambiguity;
  UnwrappedField unwrapped;
  LinkReport link;
};

BootstrapResult bootstrap_ambiguity(const UnwrappedField& lower, double b_lower, const Interferogram& higher,
                                    Pixel reference, const BootstrapOptions& options = {});

// Recomputes a link report from two unwrapped fields.
LinkReport link_statistics(const UnwrappedField& lower, double b_lower, const UnwrappedField& higher,
                           double b_higher, const BootstrapOptions& options = {});

struct AsymptoticResult {
  std::vector<UnwrappedField> fields;  // one per physical interferogram, stack order
  UnwrappedField short_baseline;       // unwrapped B1 interferogram
  double b1 = 0.0;
  std::vector<LinkReport> links;
  // Product over links of (1 - failure fraction).
  double success_rate() const;
};

// Wrapped B1 interferogram: a stack member or the recorded integer combination.
Grid<double> short_baseline_phase(const InterferogramStack& stack, const BaselineSet& set);

AsymptoticResult asymptotic_unwrap(const InterferogramStack& stack, const BaselineSet& set,
                                   const BootstrapOptions& options = {});

HeightField initial_height(const UnwrappedField& sbi, const RadarGeometry& g, double b_perp);

// Fraction of masked-in pixels whose unwrapped phase differs from the truth by
// at least pi.
double ambiguity_error_fraction(const UnwrappedField& estimate, const Grid<double>& truth);

}  // namespace tda
