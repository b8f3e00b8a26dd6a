#include <array>
#include <unordered_map>

#include "coco/stats.hpp"

namespace coco {

TrendResult background_trend(std::span<const PointAnnotation> annotations,
                             std::span<const ImageRecord> records) {
  std::unordered_map<std::string, FstGroup> fst_of;
  for (const auto& r : records) fst_of.emplace(r.image_id, r.fst_group);

  struct Acc {
    std::size_t n = 0;
    double r = 0, g = 0, b = 0, lum = 0;
  };
  std::array<Acc, 3> acc{};
  TrendResult out;
  for (const auto& a : latest_annotations(annotations)) {
    auto it = fst_of.find(a.image_id);
    if (it == fst_of.end()) {
      ++out.unmatched;
      continue;
    }
    const AveragedColor bg = average_background(a);
    auto& s = acc[static_cast<std::size_t>(it->second)];
    ++s.n;
    s.r += bg.r;
    s.g += bg.g;
    s.b += bg.b;
    s.lum += relative_luminance(bg);
  }
  for (auto g : kFstGroups) {
    const auto& s = acc[static_cast<std::size_t>(g)];
    if (s.n == 0) continue;
    const double n = static_cast<double>(s.n);
    out.groups.push_back({g, s.n, {s.r / n, s.g / n, s.b / n}, s.lum / n});
  }
  out.monotone_darker = out.groups.size() >= 2;
  for (std::size_t i = 1; i < out.groups.size(); ++i) {
    if (!(out.groups[i - 1].mean_luminance > out.groups[i].mean_luminance)) {
      out.monotone_darker = false;
    }
  }
  return out;
}

}  // namespace coco
