#include "tda/kernels.hpp"

#include <immintrin.h>

#include <numbers>

namespace tda::kernels::avx2 {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kRound = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;

inline __m256d wrap4(__m256d x) {
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  const __m256d pi = _mm256_set1_pd(kPi);
  const __m256d neg_pi = _mm256_set1_pd(-kPi);
  const __m256d k = _mm256_round_pd(_mm256_div_pd(x, two_pi), kRound);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(k, two_pi));
  const __m256d lo = _mm256_cmp_pd(r, neg_pi, _CMP_LE_OQ);
  r = _mm256_blendv_pd(r, _mm256_add_pd(r, two_pi), lo);
  const __m256d hi = _mm256_cmp_pd(r, pi, _CMP_GT_OQ);
  r = _mm256_blendv_pd(r, _mm256_sub_pd(r, two_pi), hi);
  return r;
}
}  // namespace

void wrap(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, wrap4(_mm256_loadu_pd(in + i)));
  if (i < n) scalar::wrap(in + i, out + i, n - i);
}

void scale(const double* in, double factor, double* out, std::size_t n) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(in + i), f));
  if (i < n) scalar::scale(in + i, factor, out + i, n - i);
}

void wrapped_combination(const double* a, const double* b, double m, double* out, std::size_t n) {
  const __m256d mm = _mm256_set1_pd(m);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_mul_pd(mm, _mm256_loadu_pd(b + i)));
    _mm256_storeu_pd(out + i, wrap4(d));
  }
  if (i < n) scalar::wrapped_combination(a + i, b + i, m, out + i, n - i);
}

void bootstrap_round(const double* pred, const double* wrapped, double* unwrapped, double* amb,
                     std::size_t n) {
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(wrapped + i);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pred + i), w);
    const __m256d k = _mm256_round_pd(_mm256_div_pd(d, two_pi), kRound);
    _mm256_storeu_pd(amb + i, k);
    _mm256_storeu_pd(unwrapped + i, _mm256_add_pd(w, _mm256_mul_pd(k, two_pi)));
  }
  if (i < n) scalar::bootstrap_round(pred + i, wrapped + i, unwrapped + i, amb + i, n - i);
}

}  // namespace tda::kernels::avx2
