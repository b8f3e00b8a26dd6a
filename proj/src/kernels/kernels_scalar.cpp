#include <algorithm>

#include "coco/kernels.hpp"

namespace coco::kernels::scalar {

void relative_luminance(const double* r, const double* g, const double* b,
                        double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = 0.2126 * r[i] + 0.7152 * g[i] + 0.0722 * b[i];
  }
}

void contrast_ratio(const double* lum_a, const double* lum_b, double* value,
                    double* lighter, double* darker, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = std::max(lum_a[i], lum_b[i]);
    const double lo = std::min(lum_a[i], lum_b[i]);
    value[i] = (hi + 0.05) / (lo + 0.05);
    lighter[i] = hi;
    darker[i] = lo;
  }
}

}  // namespace coco::kernels::scalar
