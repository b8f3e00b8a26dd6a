#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "coco/cohort.hpp"
#include "coco/errors.hpp"
#include "coco/rng.hpp"

namespace coco {

std::string_view to_string(SplitPhase p) {
  return p == SplitPhase::finetune_train ? "finetune_train" : "finetune_eval";
}

SplitPhase parse_split_phase(std::string_view s) {
  if (s == "finetune_train") return SplitPhase::finetune_train;
  if (s == "finetune_eval") return SplitPhase::finetune_eval;
  throw ContractError("unknown split phase '" + std::string(s) + "'");
}

std::size_t stratum_train_count(std::size_t n, double fraction) {
  if (n < 2) return n;
  const auto rounded = static_cast<std::size_t>(std::floor(fraction * n + 0.5));
  return std::clamp<std::size_t>(rounded, 1, n - 1);
}

SplitResult make_splits(std::span<const ImageRecord> records,
                        std::span<const std::uint64_t> seeds,
                        double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputDomainError("train fraction must lie strictly between 0 and 1");
  }
  using Key = std::tuple<bool, FstGroup, ContrastGroup>;
  std::map<Key, std::vector<std::string>> strata;
  for (const auto& r : records) {
    if (!r.contrast_group || *r.contrast_group == ContrastGroup::excluded) continue;
    strata[{r.malignant, r.fst_group, *r.contrast_group}].push_back(r.image_id);
  }
  SplitResult out;
  for (auto& [key, ids] : strata) {
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw ContractError("duplicate image_id in split input");
    }
    if (ids.size() < 2) {
      const auto& [mal, fst, grp] = key;
      out.warnings.push_back("stratum malignant=" + std::to_string(mal ? 1 : 0) +
                             " fst=" + std::string(to_string(fst)) +
                             " contrast=" + std::string(to_string(grp)) +
                             " has " + std::to_string(ids.size()) +
                             " record(s); assigned wholly to train");
    }
  }

  for (const auto seed : seeds) {
    SeededRng rng(seed);
    std::vector<SplitAssignment> batch;
    for (const auto& [key, ids] : strata) {
      std::vector<std::string> order = ids;
      rng.shuffle(std::span<std::string>(order));
      const std::size_t n_train = stratum_train_count(order.size(), train_fraction);
      for (std::size_t i = 0; i < order.size(); ++i) {
        batch.push_back({order[i], seed,
                         i < n_train ? SplitPhase::finetune_train
                                     : SplitPhase::finetune_eval});
      }
    }
    std::sort(batch.begin(), batch.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
    out.assignments.insert(out.assignments.end(), batch.begin(), batch.end());
  }
  return out;
}

}  // namespace coco
