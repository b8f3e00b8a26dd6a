#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "coco/errors.hpp"
#include "coco/stats.hpp"

namespace coco {

double auc(std::span<const std::uint8_t> labels, std::span<const double> scores,
           std::string_view subgroup) {
  if (labels.size() != scores.size()) {
    throw InputDomainError("auc: " + std::to_string(labels.size()) +
                           " labels but " + std::to_string(scores.size()) +
                           " scores");
  }
  const std::size_t n = labels.size();
  std::size_t n_pos = 0;
  for (auto l : labels) n_pos += l ? 1 : 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    std::string where = subgroup.empty() ? std::string("input")
                                         : "subgroup '" + std::string(subgroup) + "'";
    throw UndefinedMetric("AUC undefined for " + where + ": " +
                          std::to_string(n_pos) + " positive, " +
                          std::to_string(n_neg) + " negative");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw InputDomainError("auc: NaN score");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based average ranks of the positives; each value is a multiple
  // of 0.5, so the sum is exact.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) rank_sum += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(n_neg));
}

}  // namespace coco
