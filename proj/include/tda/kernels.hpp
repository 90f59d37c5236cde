#pragma once

// Per-pixel phase kernels. Each has a scalar reference and an AVX2 variant
// chosen at runtime; both produce bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>

namespace tda::kernels {

enum class Isa { Scalar, Avx2 };

Isa detected_isa();
Isa active_isa();
// Requests an ISA; falls back to scalar when the CPU lacks it. Returns the ISA in effect.
Isa set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);

// out[i] = wrap(in[i]) into (-pi, pi]. In-place allowed.
void wrap(std::span<const double> in, std::span<double> out);

// out[i] = factor * in[i]
void scale(std::span<const double> in, double factor, std::span<double> out);

// out[i] = wrap(a[i] - m * b[i]); forms a combined interferogram.
void wrapped_combination(std::span<const double> a, std::span<const double> b, double m,
                         std::span<double> out);

// n = round((predicted - wrapped) / 2pi), unwrapped = wrapped + 2pi n.
// Rounding is to nearest, ties to even.
void bootstrap_round(std::span<const double> predicted, std::span<const double> wrapped,
                     std::span<double> unwrapped, std::span<double> ambiguity);

namespace scalar {
void wrap(const double* in, double* out, std::size_t n);
void scale(const double* in, double factor, double* out, std::size_t n);
void wrapped_combination(const double* a, const double* b, double m, double* out, std::size_t n);
void bootstrap_round(const double* pred, const double* wrapped, double* unwrapped, double* amb,
                     std::size_t n);
}  // namespace scalar

namespace avx2 {
void wrap(const double* in, double* out, std::size_t n);
void scale(const double* in, double factor, double* out, std::size_t n);
void wrapped_combination(const double* a, const double* b, double m, double* out, std::size_t n);
void bootstrap_round(const double* pred, const double* wrapped, double* unwrapped, double* amb,
                     std::size_t n);
}  // namespace avx2

}  // namespace tda::kernels
