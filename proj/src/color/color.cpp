#include "coco/color.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coco/errors.hpp"

namespace coco {

namespace {

std::uint8_t checked_channel(int c, const char* name) {
  if (c < 0 || c > 255) {
    throw InputDomainError(std::string("channel ") + name + " = " +
                           std::to_string(c) + " outside [0, 255]");
  }
  return static_cast<std::uint8_t>(c);
}

}  // namespace

SrgbColor make_srgb(int r, int g, int b) {
  return {checked_channel(r, "r"), checked_channel(g, "g"),
          checked_channel(b, "b")};
}

double srgb_to_linear(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw InputDomainError("normalized channel " + std::to_string(s) +
                           " outside [0, 1]");
  }
  if (s <= kLinearBreakpoint) return s / 12.92;
  return std::pow((s + 0.055) / 1.055, 2.4);
}

double srgb_channel_to_linear(int c) {
  return srgb_to_linear(checked_channel(c, "value") / 255.0);
}

LinearColor linearize(const AveragedColor& c) {
  return {srgb_to_linear(c.r / 255.0), srgb_to_linear(c.g / 255.0),
          srgb_to_linear(c.b / 255.0)};
}

LinearColor linearize(const SrgbColor& c) { return linearize(to_averaged(c)); }

double relative_luminance(const LinearColor& c) {
  // Evaluation order is shared with the vector kernels.
  return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b;
}

double relative_luminance(const AveragedColor& c) {
  return relative_luminance(linearize(c));
}

AveragedColor average_points(std::span<const SrgbColor> points,
                             std::size_t expected_count) {
  if (points.empty() || points.size() != expected_count) {
    throw ProtocolViolation("expected exactly " +
                            std::to_string(expected_count) + " points, got " +
                            std::to_string(points.size()));
  }
  // Integer sums are exact, so the mean does not depend on point order.
  long sr = 0, sg = 0, sb = 0;
  for (const auto& p : points) {
    sr += p.r;
    sg += p.g;
    sb += p.b;
  }
  const auto n = static_cast<double>(points.size());
  return {sr / n, sg / n, sb / n};
}

ContrastScore contrast_from_luminance(double luminance_a, double luminance_b) {
  const double lighter = std::max(luminance_a, luminance_b);
  const double darker = std::min(luminance_a, luminance_b);
  return {(lighter + 0.05) / (darker + 0.05), lighter, darker};
}

ContrastScore contrast_ratio(const AveragedColor& fg, const AveragedColor& bg) {
  return contrast_from_luminance(relative_luminance(fg), relative_luminance(bg));
}

bool is_abnormal_score(const ContrastScore& score, double l_min) {
  return std::min(score.lighter, score.darker) < l_min;
}

}  // namespace coco
