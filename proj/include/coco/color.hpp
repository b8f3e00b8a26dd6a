#pragma once

#include <cstdint>
#include <span>

namespace coco {

// A picked pixel in gamma-encoded display space.
struct SrgbColor {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const SrgbColor&, const SrgbColor&) = default;
};

// Per-channel mean of several picks, still gamma-encoded and on the 0..255
// scale. Kept real-valued; never re-quantized before luminance.
struct AveragedColor {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const AveragedColor&, const AveragedColor&) = default;
};

struct LinearColor {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

// WCAG contrast ratio together with the two luminances it was formed from.
struct ContrastScore {
  double value = 1.0;    // (lighter + 0.05) / (darker + 0.05), in [1, 21]
  double lighter = 0.0;  // max relative luminance
  double darker = 0.0;   // min relative luminance
};

inline constexpr double kLinearBreakpoint = 0.03928;
inline constexpr double kDefaultLuminanceFloor = 0.01;
inline constexpr std::size_t kPicksPerRegion = 3;

// Throws InputDomainError when `r`, `g` or `b` is outside [0, 255].
SrgbColor make_srgb(int r, int g, int b);

// WCAG linearization of a normalized gamma-encoded value s in [0, 1].
double srgb_to_linear(double s);

// WCAG linearization of an 8-bit channel. Throws InputDomainError outside
// [0, 255].
double srgb_channel_to_linear(int c);

LinearColor linearize(const AveragedColor& c);
LinearColor linearize(const SrgbColor& c);

double relative_luminance(const LinearColor& c);

// Luminance of a gamma-encoded averaged color: single linearization pass on
// the mean, then the luminance weights.
double relative_luminance(const AveragedColor& c);

// Per-channel arithmetic mean in gamma-encoded space. Throws
// ProtocolViolation when the number of points differs from expected_count.
AveragedColor average_points(std::span<const SrgbColor> points,
                             std::size_t expected_count = kPicksPerRegion);

// Symmetric in its arguments.
ContrastScore contrast_from_luminance(double luminance_a, double luminance_b);
ContrastScore contrast_ratio(const AveragedColor& fg, const AveragedColor& bg);

// True iff the darker luminance falls strictly below l_min; near-black
// denominators dominate the ratio.
bool is_abnormal_score(const ContrastScore& score,
                       double l_min = kDefaultLuminanceFloor);

inline AveragedColor to_averaged(const SrgbColor& c) {
  return {static_cast<double>(c.r), static_cast<double>(c.g),
          static_cast<double>(c.b)};
}

}  // namespace coco
