#include <atomic>
#include <stdexcept>

#include "tda/kernels.hpp"

namespace tda::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(TDA_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel span sizes differ");
}

}  // namespace

Isa detected_isa() { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && !cpu_has_avx2()) isa = Isa::Scalar;
  active().store(isa, std::memory_order_relaxed);
  return isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

#if defined(TDA_HAVE_AVX2)
#define TDA_DISPATCH(fn, ...)                                    \
  do {                                                           \
    if (active_isa() == Isa::Avx2) return avx2::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__);                              \
  } while (0)
#else
#define TDA_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void wrap(std::span<const double> in, std::span<double> out) {
  check_sizes(in.size(), out.size());
  TDA_DISPATCH(wrap, in.data(), out.data(), in.size());
}

void scale(std::span<const double> in, double factor, std::span<double> out) {
  check_sizes(in.size(), out.size());
  TDA_DISPATCH(scale, in.data(), factor, out.data(), in.size());
}

void wrapped_combination(std::span<const double> a, std::span<const double> b, double m,
                         std::span<double> out) {
  check_sizes(a.size(), b.size());
  check_sizes(a.size(), out.size());
  TDA_DISPATCH(wrapped_combination, a.data(), b.data(), m, out.data(), a.size());
}

void bootstrap_round(std::span<const double> predicted, std::span<const double> wrapped,
                     std::span<double> unwrapped, std::span<double> ambiguity) {
  check_sizes(predicted.size(), wrapped.size());
  check_sizes(predicted.size(), unwrapped.size());
  check_sizes(predicted.size(), ambiguity.size());
  TDA_DISPATCH(bootstrap_round, predicted.data(), wrapped.data(), unwrapped.data(),
               ambiguity.data(), predicted.size());
}

}  // namespace tda::kernels
