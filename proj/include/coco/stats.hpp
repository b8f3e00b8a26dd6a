#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coco/cohort.hpp"

namespace coco {

// ROC AUC as the Mann-Whitney statistic: fraction of (positive, negative)
// pairs where the positive scores higher, ties counted 0.5. Computed from
// average ranks in O(n log n). Throws UndefinedMetric naming `subgroup` when
// either class is absent.
double auc(std::span<const std::uint8_t> labels, std::span<const double> scores,
           std::string_view subgroup = {});

struct BootstrapInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t resamples_used = 0;
  std::size_t resamples_skipped = 0;  // single-class after the retry cap
};

inline constexpr std::size_t kDefaultBootstrapResamples = 1000;
inline constexpr double kDefaultBootstrapLevel = 0.95;
inline constexpr int kBootstrapRetries = 10;

// Percentile interval of the AUC over image-level resamples with
// replacement. A single-class resample is redrawn up to kBootstrapRetries
// times, then skipped.
BootstrapInterval bootstrap_ci(std::span<const std::uint8_t> labels,
                               std::span<const double> scores,
                               std::size_t n_resamples = kDefaultBootstrapResamples,
                               double level = kDefaultBootstrapLevel,
                               std::uint64_t seed = 0);

// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted values.
double quantile(std::vector<double> values, double q);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Student-t CDF with `df` degrees of freedom.
double student_t_cdf(double t, double df);

// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double t = 0.0;  // +/-inf when the differences are constant and nonzero
  double p = 1.0;
  std::size_t n = 0;
  double mean_diff = 0.0;
  double sd_diff = 0.0;
  bool degenerate = false;  // zero variance of differences
};

// Paired t-test on a[i] - b[i]; sample sd uses n - 1.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

struct ScoreSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

ScoreSummary summarize(std::span<const double> values);

struct ConsistencyReport {
  std::string labeller_a;
  std::string labeller_b;
  ScoreSummary summary_a;
  ScoreSummary summary_b;
  TTestResult ttest;
  std::vector<std::string> image_ids;  // shared images, sorted
  std::vector<double> scores_a;
  std::vector<double> scores_b;
};

// Paired test over keyed scores. Throws ContractError listing the images
// present for only one labeller. Use consistency_from_log for the
// intersection semantics of the CLI.
TTestResult paired_ttest(const std::map<std::string, double>& a,
                         const std::map<std::string, double>& b);

// Scores both labellers' latest annotations and compares them over the
// images both annotated. Throws ContractError on an empty intersection.
ConsistencyReport consistency_from_log(std::span<const PointAnnotation> log,
                                       std::string_view labeller_a,
                                       std::string_view labeller_b);

struct ClassWeights {
  std::vector<std::size_t> counts;
  std::vector<double> weights;  // proportional to 1 / count, sum 1
};

ClassWeights class_weights(std::span<const std::size_t> counts);

struct FstBackground {
  FstGroup fst_group = FstGroup::I_II;
  std::size_t n = 0;            // annotations contributing
  AveragedColor mean_color;     // per-channel mean of averaged backgrounds
  double mean_luminance = 0.0;  // mean of per-annotation background luminance
};

struct TrendResult {
  std::vector<FstBackground> groups;  // I-II, III-IV, V-VI order; empty omitted
  bool monotone_darker = false;       // strictly decreasing luminance
  std::size_t unmatched = 0;          // annotations with no cohort record
};

// Uses the latest annotation per (image, labeller). The verdict needs at
// least two present groups.
TrendResult background_trend(std::span<const PointAnnotation> annotations,
                             std::span<const ImageRecord> records);

}  // namespace coco
