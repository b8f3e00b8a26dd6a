// Compiled with -mavx2 only; callers reach it through dispatch after a CPU
// feature check.

#include <immintrin.h>

#include "coco/kernels.hpp"

namespace coco::kernels::avx2 {

void relative_luminance(const double* r, const double* g, const double* b,
                        double* out, std::size_t n) {
  const __m256d wr = _mm256_set1_pd(0.2126);
  const __m256d wg = _mm256_set1_pd(0.7152);
  const __m256d wb = _mm256_set1_pd(0.0722);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vr = _mm256_loadu_pd(r + i);
    const __m256d vg = _mm256_loadu_pd(g + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    // (wr*r + wg*g) + wb*b, matching the scalar evaluation order
    __m256d acc = _mm256_add_pd(_mm256_mul_pd(wr, vr), _mm256_mul_pd(wg, vg));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wb, vb));
    _mm256_storeu_pd(out + i, acc);
  }
  scalar::relative_luminance(r + i, g + i, b + i, out + i, n - i);
}

void contrast_ratio(const double* lum_a, const double* lum_b, double* value,
                    double* lighter, double* darker, std::size_t n) {
  const __m256d offset = _mm256_set1_pd(0.05);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(lum_a + i);
    const __m256d b = _mm256_loadu_pd(lum_b + i);
    const __m256d hi = _mm256_max_pd(a, b);
    const __m256d lo = _mm256_min_pd(a, b);
    const __m256d ratio =
        _mm256_div_pd(_mm256_add_pd(hi, offset), _mm256_add_pd(lo, offset));
    _mm256_storeu_pd(value + i, ratio);
    _mm256_storeu_pd(lighter + i, hi);
    _mm256_storeu_pd(darker + i, lo);
  }
  scalar::contrast_ratio(lum_a + i, lum_b + i, value + i, lighter + i,
                         darker + i, n - i);
}

}  // namespace coco::kernels::avx2
