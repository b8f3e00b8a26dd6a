#include <algorithm>
#include <cmath>

#include "coco/errors.hpp"
#include "coco/rng.hpp"
#include "coco/stats.hpp"

namespace coco {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InputDomainError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw InputDomainError("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BootstrapInterval bootstrap_ci(std::span<const std::uint8_t> labels,
                               std::span<const double> scores,
                               std::size_t n_resamples, double level,
                               std::uint64_t seed) {
  if (n_resamples < 100) throw InputDomainError("bootstrap needs at least 100 resamples");
  if (!(level > 0.0 && level < 1.0)) throw InputDomainError("bootstrap level must lie in (0, 1)");
  // Validates lengths and class presence on the full sample.
  (void)auc(labels, scores);

  const std::size_t n = labels.size();
  SeededRng rng(seed);
  std::vector<std::uint8_t> rl(n);
  std::vector<double> rs(n);
  std::vector<double> stats;
  stats.reserve(n_resamples);
  BootstrapInterval out;
  for (std::size_t r = 0; r < n_resamples; ++r) {
    bool drawn = false;
    for (int attempt = 0; attempt <= kBootstrapRetries && !drawn; ++attempt) {
      std::size_t n_pos = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(rng.uniform_below(n));
        rl[i] = labels[k];
        rs[i] = scores[k];
        n_pos += rl[i] ? 1 : 0;
      }
      drawn = n_pos > 0 && n_pos < n;
    }
    if (!drawn) {
      ++out.resamples_skipped;
      continue;
    }
    stats.push_back(auc(rl, rs));
  }
  if (stats.empty()) throw UndefinedMetric("every bootstrap resample was single-class");
  const double alpha = (1.0 - level) / 2.0;
  out.lo = quantile(stats, alpha);
  out.hi = quantile(stats, 1.0 - alpha);
  out.resamples_used = stats.size();
  return out;
}

}  // namespace coco
