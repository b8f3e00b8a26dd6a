#include <cmath>
#include <limits>
#include <string>

#include "coco/errors.hpp"
#include "coco/stats.hpp"

namespace coco {

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractError("paired t-test needs aligned samples: " +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  const std::size_t n = a.size();
  if (n < 2) throw ContractError("paired t-test needs at least 2 pairs");

  TTestResult r;
  r.n = n;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] - b[i];
  r.mean_diff = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = (a[i] - b[i]) - r.mean_diff;
    ss += dev * dev;
  }
  r.sd_diff = std::sqrt(ss / static_cast<double>(n - 1));

  if (r.sd_diff == 0.0) {
    r.degenerate = true;
    if (r.mean_diff == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
      r.p = 0.0;
    }
    return r;
  }
  r.t = r.mean_diff / (r.sd_diff / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, static_cast<double>(n - 1));
  return r;
}

TTestResult paired_ttest(const std::map<std::string, double>& a,
                         const std::map<std::string, double>& b) {
  std::vector<std::string> mismatched;
  for (const auto& [id, v] : a) {
    if (!b.count(id)) mismatched.push_back(id);
  }
  for (const auto& [id, v] : b) {
    if (!a.count(id)) mismatched.push_back(id);
  }
  if (!mismatched.empty()) {
    std::string msg = "paired t-test image sets differ (" +
                      std::to_string(mismatched.size()) + " unmatched):";
    for (const auto& id : mismatched) msg += " " + id;
    throw ContractError(msg);
  }
  std::vector<double> va, vb;
  for (const auto& [id, v] : a) {
    va.push_back(v);
    vb.push_back(b.at(id));
  }
  return paired_ttest(va, vb);
}

ScoreSummary summarize(std::span<const double> values) {
  ScoreSummary s;
  s.n = values.size();
  if (values.empty()) return s;
  std::vector<double> v(values.begin(), values.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  s.min = quantile(v, 0.0);
  s.q1 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q3 = quantile(v, 0.75);
  s.max = quantile(v, 1.0);
  return s;
}

ConsistencyReport consistency_from_log(std::span<const PointAnnotation> log,
                                       std::string_view labeller_a,
                                       std::string_view labeller_b) {
  const auto la = latest_for_labeller(log, labeller_a);
  const auto lb = latest_for_labeller(log, labeller_b);
  ConsistencyReport rep;
  rep.labeller_a = std::string(labeller_a);
  rep.labeller_b = std::string(labeller_b);
  for (const auto& [id, ann] : la) {
    auto it = lb.find(id);
    if (it == lb.end()) continue;
    rep.image_ids.push_back(id);
    rep.scores_a.push_back(
        contrast_ratio(average_foreground(ann), average_background(ann)).value);
    rep.scores_b.push_back(contrast_ratio(average_foreground(it->second),
                                          average_background(it->second))
                               .value);
  }
  if (rep.image_ids.empty()) {
    throw ContractError("labellers '" + rep.labeller_a + "' (" +
                        std::to_string(la.size()) + " images) and '" +
                        rep.labeller_b + "' (" + std::to_string(lb.size()) +
                        " images) share no images: intersection size 0");
  }
  rep.summary_a = summarize(rep.scores_a);
  rep.summary_b = summarize(rep.scores_b);
  rep.ttest = paired_ttest(rep.scores_a, rep.scores_b);
  return rep;
}

}  // namespace coco
