#pragma once

// Batch color kernels over structure-of-arrays inputs. Each kernel has a
// scalar reference and vectorized variants; the active variant is chosen at
// runtime from CPU features. All variants produce bit-identical output: they
// evaluate the same IEEE operations in the same order with no contraction.

#include <cstddef>
#include <span>
#include <string_view>

namespace coco::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Whether this binary carries the variant and the CPU can run it.
bool isa_available(Isa isa);

// Best available variant, unless the COCO_KERNELS environment variable names
// a different available one ("scalar" or "avx2").
Isa active_isa();

// Overrides the active variant for the process. Throws InputDomainError if
// the variant is not available.
void set_active_isa(Isa isa);

// out[i] = 0.2126 r[i] + 0.7152 g[i] + 0.0722 b[i] on linear channels.
void relative_luminance(std::span<const double> r, std::span<const double> g,
                        std::span<const double> b, std::span<double> out);

// WCAG ratio for each luminance pair plus the lighter/darker luminances.
void contrast_ratio(std::span<const double> lum_a, std::span<const double> lum_b,
                    std::span<double> value, std::span<double> lighter,
                    std::span<double> darker);

// Same kernels through an explicit variant, for equivalence testing.
void relative_luminance(Isa isa, std::span<const double> r,
                        std::span<const double> g, std::span<const double> b,
                        std::span<double> out);
void contrast_ratio(Isa isa, std::span<const double> lum_a,
                    std::span<const double> lum_b, std::span<double> value,
                    std::span<double> lighter, std::span<double> darker);

namespace scalar {
void relative_luminance(const double* r, const double* g, const double* b,
                        double* out, std::size_t n);
void contrast_ratio(const double* lum_a, const double* lum_b, double* value,
                    double* lighter, double* darker, std::size_t n);
}  // namespace scalar

namespace avx2 {
void relative_luminance(const double* r, const double* g, const double* b,
                        double* out, std::size_t n);
void contrast_ratio(const double* lum_a, const double* lum_b, double* value,
                    double* lighter, double* darker, std::size_t n);
}  // namespace avx2

}  // namespace coco::kernels
