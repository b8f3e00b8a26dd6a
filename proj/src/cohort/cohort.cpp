#include "coco/cohort.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <utility>

#include "coco/errors.hpp"
#include "coco/kernels.hpp"

namespace coco {

std::string_view to_string(FstGroup g) {
  switch (g) {
    case FstGroup::I_II:
      return "I-II";
    case FstGroup::III_IV:
      return "III-IV";
    case FstGroup::V_VI:
      return "V-VI";
  }
  return "?";
}

std::string_view to_string(ContrastGroup g) {
  switch (g) {
    case ContrastGroup::high:
      return "high";
    case ContrastGroup::low:
      return "low";
    case ContrastGroup::excluded:
      return "excluded";
  }
  return "?";
}

FstGroup parse_fst_group(std::string_view s) {
  for (auto g : kFstGroups) {
    if (s == to_string(g)) return g;
  }
  throw ContractError("unknown fst_group '" + std::string(s) +
                      "' (expected I-II, III-IV or V-VI)");
}

ContrastGroup parse_contrast_group(std::string_view s) {
  for (auto g : {ContrastGroup::high, ContrastGroup::low, ContrastGroup::excluded}) {
    if (s == to_string(g)) return g;
  }
  throw ContractError("unknown contrast_group '" + std::string(s) + "'");
}

namespace {

void check_region(const std::vector<Pick>& picks, const char* region, int width,
                  int height) {
  if (picks.size() != kPicksPerRegion) {
    throw ProtocolViolation(std::string(region) + " requires exactly " +
                            std::to_string(kPicksPerRegion) + " points, got " +
                            std::to_string(picks.size()));
  }
  for (const auto& p : picks) {
    if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
      throw ProtocolViolation(std::string(region) + " point (" +
                              std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") is outside the " + std::to_string(width) + "x" +
                              std::to_string(height) + " image");
    }
  }
}

std::vector<SrgbColor> colors_of(const std::vector<Pick>& picks) {
  std::vector<SrgbColor> out;
  out.reserve(picks.size());
  for (const auto& p : picks) out.push_back(p.color);
  return out;
}

}  // namespace

void validate_annotation(const PointAnnotation& a, int width, int height) {
  if (a.schema_version != kAnnotationSchemaVersion) {
    throw ProtocolViolation("unsupported schema_version " +
                            std::to_string(a.schema_version));
  }
  if (a.image_id.empty()) throw ProtocolViolation("image_id is required");
  if (a.labeller_id.empty()) throw ProtocolViolation("labeller_id is required");
  check_region(a.foreground, "foreground", width, height);
  check_region(a.background, "background", width, height);
  std::set<std::pair<int, int>> fg;
  for (const auto& p : a.foreground) fg.emplace(p.x, p.y);
  for (const auto& p : a.background) {
    if (fg.count({p.x, p.y})) {
      throw ProtocolViolation("point (" + std::to_string(p.x) + ", " +
                              std::to_string(p.y) +
                              ") is both a foreground and a background pick");
    }
  }
  if (!a.lighting_flag) {
    throw ProtocolViolation(
        "lighting_flag must attest that foreground and background points share "
        "lighting conditions");
  }
  if (a.patch_size < 1 || a.patch_size % 2 == 0) {
    throw ProtocolViolation("patch_size must be a positive odd number");
  }
}

AveragedColor average_foreground(const PointAnnotation& a) {
  const auto c = colors_of(a.foreground);
  return average_points(c);
}

AveragedColor average_background(const PointAnnotation& a) {
  const auto c = colors_of(a.background);
  return average_points(c);
}

std::vector<PointAnnotation> latest_annotations(
    std::span<const PointAnnotation> log) {
  std::map<std::pair<std::string, std::string>, std::size_t> last;
  for (std::size_t i = 0; i < log.size(); ++i) {
    last[{log[i].image_id, log[i].labeller_id}] = i;
  }
  std::vector<std::size_t> idx;
  idx.reserve(last.size());
  for (const auto& [key, i] : last) idx.push_back(i);
  std::sort(idx.begin(), idx.end());
  std::vector<PointAnnotation> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(log[i]);
  return out;
}

std::map<std::string, PointAnnotation> latest_for_labeller(
    std::span<const PointAnnotation> log, std::string_view labeller_id) {
  std::map<std::string, PointAnnotation> out;
  for (const auto& a : log) {
    if (a.labeller_id == labeller_id) out.insert_or_assign(a.image_id, a);
  }
  return out;
}

std::vector<ContrastScore> batch_contrast(std::span<const AveragedColor> fg,
                                          std::span<const AveragedColor> bg) {
  if (fg.size() != bg.size()) {
    throw InputDomainError("foreground and background batches differ in size");
  }
  const std::size_t n = fg.size();
  // SoA: rows 0..2 foreground channels, 3..5 background channels
  std::vector<double> lin(6 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const LinearColor f = linearize(fg[i]);
    const LinearColor b = linearize(bg[i]);
    lin[i] = f.r;
    lin[n + i] = f.g;
    lin[2 * n + i] = f.b;
    lin[3 * n + i] = b.r;
    lin[4 * n + i] = b.g;
    lin[5 * n + i] = b.b;
  }
  auto row = [&](std::size_t k) {
    return std::span<const double>(lin.data() + k * n, n);
  };
  std::vector<double> lum_fg(n), lum_bg(n), value(n), lighter(n), darker(n);
  kernels::relative_luminance(row(0), row(1), row(2), lum_fg);
  kernels::relative_luminance(row(3), row(4), row(5), lum_bg);
  kernels::contrast_ratio(lum_fg, lum_bg, value, lighter, darker);
  std::vector<ContrastScore> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {value[i], lighter[i], darker[i]};
  return out;
}

ScoringResult score_cohort(std::span<const ImageRecord> records,
                           std::span<const PointAnnotation> annotations,
                           std::string_view labeller_id) {
  const auto latest = latest_for_labeller(annotations, labeller_id);
  ScoringResult result;
  result.records.assign(records.begin(), records.end());

  std::vector<std::size_t> scored;
  std::vector<AveragedColor> fg, bg;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    auto& rec = result.records[i];
    rec.contrast_score.reset();
    auto it = latest.find(rec.image_id);
    if (it == latest.end()) {
      result.errors.push_back({rec.image_id, "no annotation from labeller '" +
                                                 std::string(labeller_id) + "'"});
      continue;
    }
    try {
      fg.push_back(average_foreground(it->second));
      bg.push_back(average_background(it->second));
      scored.push_back(i);
    } catch (const ProtocolViolation& e) {
      if (fg.size() > bg.size()) fg.pop_back();
      result.errors.push_back({rec.image_id, e.what()});
    }
  }
  const auto scores = batch_contrast(fg, bg);
  for (std::size_t k = 0; k < scored.size(); ++k) {
    result.records[scored[k]].contrast_score = scores[k];
  }
  return result;
}

std::vector<std::string> apply_exclusions(std::vector<ImageRecord>& records,
                                          double l_min) {
  std::vector<std::string> excluded;
  for (auto& r : records) {
    if (r.contrast_score && is_abnormal_score(*r.contrast_score, l_min)) {
      r.contrast_group = ContrastGroup::excluded;
      excluded.push_back(r.image_id);
    }
  }
  return excluded;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

GroupingResult split_by_median(std::vector<ImageRecord> records) {
  GroupingResult out;
  std::vector<double> included;
  for (const auto& r : records) {
    if (r.contrast_group == ContrastGroup::excluded) {
      out.excluded.push_back(r.image_id);
      continue;
    }
    if (!r.contrast_score) {
      throw ContractError("record '" + r.image_id +
                          "' is included but has no contrast score");
    }
    included.push_back(r.contrast_score->value);
  }
  if (included.empty()) {
    throw ContractError("no included contrast scores to group");
  }
  out.cutoff = median(included);
  for (auto& r : records) {
    if (r.contrast_group == ContrastGroup::excluded) continue;
    if (r.contrast_score->value > out.cutoff) {
      r.contrast_group = ContrastGroup::high;
      ++out.n_high;
    } else {
      r.contrast_group = ContrastGroup::low;
      ++out.n_low;
    }
  }
  out.records = std::move(records);
  return out;
}

std::size_t CrossTab::cell(ContrastGroup c, FstGroup f) const {
  if (c == ContrastGroup::excluded) return 0;
  return counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)];
}

std::size_t CrossTab::row_total(ContrastGroup c) const {
  std::size_t s = 0;
  for (auto f : kFstGroups) s += cell(c, f);
  return s;
}

std::size_t CrossTab::column_total(FstGroup f) const {
  return cell(ContrastGroup::high, f) + cell(ContrastGroup::low, f);
}

std::size_t CrossTab::total() const {
  return row_total(ContrastGroup::high) + row_total(ContrastGroup::low);
}

CrossTab cross_tab(std::span<const ImageRecord> records) {
  CrossTab t;
  for (const auto& r : records) {
    if (!r.contrast_group) continue;
    if (*r.contrast_group == ContrastGroup::excluded) {
      ++t.excluded;
      continue;
    }
    ++t.counts[static_cast<std::size_t>(*r.contrast_group)]
              [static_cast<std::size_t>(r.fst_group)];
  }
  return t;
}

std::string format_cross_tab(const CrossTab& t) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-8s %7s %7s %7s %7s\n", "Contrast", "I-II",
                "III-IV", "V-VI", "Total");
  os << line;
  for (auto c : {ContrastGroup::high, ContrastGroup::low}) {
    const std::string name = c == ContrastGroup::high ? "High" : "Low";
    std::snprintf(line, sizeof line, "%-8s %7zu %7zu %7zu %7zu\n", name.c_str(),
                  t.cell(c, FstGroup::I_II), t.cell(c, FstGroup::III_IV),
                  t.cell(c, FstGroup::V_VI), t.row_total(c));
    os << line;
  }
  std::snprintf(line, sizeof line, "%-8s %7zu %7zu %7zu %7zu\n", "Total",
                t.column_total(FstGroup::I_II), t.column_total(FstGroup::III_IV),
                t.column_total(FstGroup::V_VI), t.total());
  os << line;
  if (t.excluded > 0) os << "excluded: " << t.excluded << "\n";
  return os.str();
}

}  // namespace coco
