#include "coco/audit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <unordered_map>

#include "coco/errors.hpp"
#include "coco/rng.hpp"
#include "coco/stats.hpp"

namespace coco {

std::string_view to_string(EvalPhase p) {
  return p == EvalPhase::ood_eval ? "ood_eval" : "finetune_eval";
}

EvalPhase parse_eval_phase(std::string_view s) {
  if (s == "ood_eval") return EvalPhase::ood_eval;
  if (s == "finetune_eval") return EvalPhase::finetune_eval;
  throw ContractError("unknown evaluation phase '" + std::string(s) +
                      "' (expected ood_eval or finetune_eval)");
}

std::string_view to_string(AuditAxis a) {
  switch (a) {
    case AuditAxis::contrast:
      return "contrast";
    case AuditAxis::fst:
      return "fst";
    case AuditAxis::contrast_x_fst:
      return "contrast-x-fst";
  }
  return "?";
}

AuditAxis parse_audit_axis(std::string_view s) {
  if (s == "contrast" || s == "contrast_group") return AuditAxis::contrast;
  if (s == "fst" || s == "fst_group") return AuditAxis::fst;
  if (s == "contrast-x-fst" || s == "contrast_x_fst") return AuditAxis::contrast_x_fst;
  throw ContractError("unknown audit axis '" + std::string(s) +
                      "' (expected contrast, fst or contrast-x-fst)");
}

std::vector<std::string> axis_subgroups(AuditAxis axis) {
  std::vector<std::string> out;
  switch (axis) {
    case AuditAxis::contrast:
      return {"high", "low"};
    case AuditAxis::fst:
      for (auto f : kFstGroups) out.emplace_back(to_string(f));
      return out;
    case AuditAxis::contrast_x_fst:
      for (const char* c : {"high", "low"}) {
        for (auto f : kFstGroups) out.push_back(std::string(c) + "/" + std::string(to_string(f)));
      }
      return out;
  }
  return out;
}

std::vector<GapPair> default_gaps(AuditAxis axis) {
  switch (axis) {
    case AuditAxis::contrast:
      return {{"high", "low"}};
    case AuditAxis::fst:
      return {{"V-VI", "I-II"}};
    case AuditAxis::contrast_x_fst:
      return {};
  }
  return {};
}

std::vector<GapPair> parse_gap_list(std::string_view s) {
  std::vector<GapPair> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string_view item =
        s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (!item.empty()) {
      const std::size_t colon = item.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == item.size()) {
        throw ContractError("gap '" + std::string(item) + "' must be written A:B");
      }
      out.push_back({std::string(item.substr(0, colon)), std::string(item.substr(colon + 1))});
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void validate_predictions(std::span<const PredictionRecord> predictions) {
  std::set<std::tuple<std::string, std::string, std::uint64_t, EvalPhase>> seen;
  for (const auto& p : predictions) {
    if (!(p.malignant_prob >= 0.0 && p.malignant_prob <= 1.0)) {
      throw ContractError("prediction for '" + p.image_id + "' has probability outside [0, 1]");
    }
    if (!seen.emplace(p.image_id, p.model_id, p.seed, p.phase).second) {
      throw ContractError("duplicate prediction (" + p.image_id + ", " + p.model_id + ", " +
                          std::to_string(p.seed) + ", " + std::string(to_string(p.phase)) + ")");
    }
  }
}

namespace {

std::optional<std::string> subgroup_of(const ImageRecord& r, AuditAxis axis) {
  if (!r.contrast_group || *r.contrast_group == ContrastGroup::excluded) return std::nullopt;
  switch (axis) {
    case AuditAxis::contrast:
      return std::string(to_string(*r.contrast_group));
    case AuditAxis::fst:
      return std::string(to_string(r.fst_group));
    case AuditAxis::contrast_x_fst:
      return std::string(to_string(*r.contrast_group)) + "/" +
             std::string(to_string(r.fst_group));
  }
  return std::nullopt;
}

struct Sample {
  std::string image_id;
  std::uint8_t label;
  double score;
};

// FNV-1a, so per-cell bootstrap streams do not depend on iteration order.
std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Shifted by the first value so identical inputs give their value back exactly.
double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x - v.front();
  return v.front() + sum / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Percentile interval of the mean-over-seeds AUC; each replicate resamples
// every seed's images independently.
std::optional<std::pair<double, double>> bootstrap_mean_auc(
    const std::vector<std::vector<Sample>>& per_seed, const AuditOptions& opt,
    std::uint64_t stream) {
  SeededRng rng(opt.bootstrap_seed ^ stream);
  std::vector<double> stats;
  std::vector<std::uint8_t> labels;
  std::vector<double> scores;
  for (std::size_t r = 0; r < opt.bootstrap_resamples; ++r) {
    double sum = 0.0;
    bool ok = true;
    for (const auto& samples : per_seed) {
      const std::size_t n = samples.size();
      labels.resize(n);
      scores.resize(n);
      bool drawn = false;
      for (int attempt = 0; attempt <= kBootstrapRetries && !drawn; ++attempt) {
        std::size_t pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto& s = samples[static_cast<std::size_t>(rng.uniform_below(n))];
          labels[i] = s.label;
          scores[i] = s.score;
          pos += s.label;
        }
        drawn = pos > 0 && pos < n;
      }
      if (!drawn) {
        ok = false;
        break;
      }
      sum += auc(labels, scores);
    }
    if (ok) stats.push_back(sum / static_cast<double>(per_seed.size()));
  }
  if (stats.empty()) return std::nullopt;
  const double alpha = (1.0 - opt.bootstrap_level) / 2.0;
  return std::make_pair(quantile(stats, alpha), quantile(stats, 1.0 - alpha));
}

}  // namespace

AuditReport subgroup_audit(std::span<const PredictionRecord> predictions,
                           std::span<const ImageRecord> records, AuditAxis axis,
                           std::span<const GapPair> gaps, const AuditOptions& options) {
  validate_predictions(predictions);
  const auto names = axis_subgroups(axis);
  for (const auto& g : gaps) {
    for (const auto* side : {&g.a, &g.b}) {
      if (std::find(names.begin(), names.end(), *side) == names.end()) {
        throw ContractError("gap " + g.label() + " names subgroup '" + *side +
                            "' which is not on axis " + std::string(to_string(axis)));
      }
    }
  }
  if (options.bootstrap_resamples > 0 && options.bootstrap_resamples < 100) {
    throw InputDomainError("bootstrap needs at least 100 resamples");
  }

  std::unordered_map<std::string, const ImageRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.image_id, &r);

  // (model, phase) -> seed -> subgroup -> samples
  using SeedMap = std::map<std::uint64_t, std::map<std::string, std::vector<Sample>>>;
  std::map<std::pair<std::string, EvalPhase>, SeedMap> grouped;
  AuditReport report;
  report.axis = axis;
  report.with_ci = options.bootstrap_resamples > 0;
  std::size_t joined = 0;
  for (const auto& p : predictions) {
    auto it = by_id.find(p.image_id);
    if (it == by_id.end()) {
      ++report.unjoined_predictions;
      continue;
    }
    ++joined;
    auto sub = subgroup_of(*it->second, axis);
    if (!sub) continue;
    grouped[{p.model_id, p.phase}][p.seed][*sub].push_back(
        {p.image_id, static_cast<std::uint8_t>(it->second->malignant ? 1 : 0),
         p.malignant_prob});
  }
  if (joined == 0) {
    throw ContractError("no prediction joins a cohort record by image_id");
  }

  for (auto& [key, seeds] : grouped) {
    const auto& [model, phase] = key;
    std::map<std::string, std::size_t> cell_index;
    for (const auto& name : names) {
      bool present = false;
      for (const auto& [seed, subs] : seeds) present = present || subs.count(name);
      if (!present) continue;

      AuditCell cell;
      cell.model_id = model;
      cell.phase = phase;
      cell.axis = axis;
      cell.subgroup = name;
      std::set<std::string> images;
      std::vector<std::vector<Sample>> defined_samples;
      for (auto& [seed, subs] : seeds) {
        auto it = subs.find(name);
        if (it == subs.end()) {
          cell.undefined.push_back("seed " + std::to_string(seed) + ": no images");
          continue;
        }
        auto& samples = it->second;
        // Sorted by image so results do not depend on prediction order.
        std::sort(samples.begin(), samples.end(),
                  [](const Sample& a, const Sample& b) { return a.image_id < b.image_id; });
        std::vector<std::uint8_t> labels;
        std::vector<double> scores;
        for (const auto& s : samples) {
          images.insert(s.image_id);
          labels.push_back(s.label);
          scores.push_back(s.score);
        }
        try {
          cell.seed_auc[seed] = auc(labels, scores, model + "/" + name);
          defined_samples.push_back(samples);
        } catch (const UndefinedMetric& e) {
          cell.undefined.push_back("seed " + std::to_string(seed) + ": " + e.what());
        }
      }
      cell.n_images = images.size();
      if (!cell.seed_auc.empty()) {
        std::vector<double> v;
        for (const auto& [s, a] : cell.seed_auc) v.push_back(a);
        cell.mean_auc = mean_of(v);
        cell.std_auc = sample_std(v);
        if (options.bootstrap_resamples > 0) {
          const std::uint64_t stream =
              fnv1a(name, fnv1a(to_string(phase), fnv1a(model)));
          cell.ci = bootstrap_mean_auc(defined_samples, options, stream);
        }
      }
      cell_index[name] = report.cells.size();
      report.cells.push_back(std::move(cell));
    }

    for (const auto& pair : gaps) {
      AuditGap gap;
      gap.model_id = model;
      gap.phase = phase;
      gap.axis = axis;
      gap.pair = pair;
      auto ia = cell_index.find(pair.a);
      auto ib = cell_index.find(pair.b);
      if (ia != cell_index.end() && ib != cell_index.end()) {
        const auto& ca = report.cells[ia->second];
        const auto& cb = report.cells[ib->second];
        if (ca.mean_auc && cb.mean_auc) gap.gap = *ca.mean_auc - *cb.mean_auc;
        std::vector<double> diffs;
        for (const auto& [seed, a] : ca.seed_auc) {
          auto jt = cb.seed_auc.find(seed);
          if (jt != cb.seed_auc.end()) diffs.push_back(a - jt->second);
        }
        gap.n_seeds = diffs.size();
        if (!diffs.empty()) gap.std_gap = sample_std(diffs);
      }
      report.gaps.push_back(std::move(gap));
    }
  }
  return report;
}

}  // namespace coco
