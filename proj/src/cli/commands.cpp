#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "coco/audit.hpp"
#include "coco/cli.hpp"
#include "coco/errors.hpp"
#include "coco/io.hpp"

namespace coco::cli {

namespace {

std::ostream& out_of(const Common& c) { return c.out ? *c.out : std::cout; }
std::ostream& err_of(const Common& c) { return c.err ? *c.err : std::cerr; }

}  // namespace

int cmd_score(const Common& c, const ScoreArgs& a) {
  const auto cohort = io::read_cohort(a.cohort);
  const auto log = io::read_annotation_log(a.annotations);
  if (latest_for_labeller(log, a.labeller).empty()) {
    throw ContractError("labeller '" + a.labeller + "' has no annotations in " +
                        a.annotations.string());
  }
  const auto result = score_cohort(cohort, log, a.labeller);

  RunManifest m{"score", {a.cohort, a.annotations},
                {{"labeller", a.labeller}, {"l_min", a.l_min}}};
  write_output(c.out_dir, "scores.csv", io::scores_csv(result.records, a.l_min), m);
  write_output(c.out_dir, "exclusions.csv", io::exclusions_csv(result.records, a.l_min), m);

  std::size_t scored = 0, excluded = 0;
  for (const auto& r : result.records) {
    if (!r.contrast_score) continue;
    ++scored;
    if (is_abnormal_score(*r.contrast_score, a.l_min)) {
      ++excluded;
      err_of(c) << "excluded: " << r.image_id << " (l_lighter="
                << io::format_double(r.contrast_score->lighter)
                << ", l_darker=" << io::format_double(r.contrast_score->darker) << ")\n";
    }
  }
  for (const auto& e : result.errors) {
    err_of(c) << "unscored: " << e.image_id << ": " << e.message << "\n";
  }
  out_of(c) << "scored " << scored << " of " << cohort.size() << " images; " << excluded
            << " excluded (l_min=" << io::format_double(a.l_min) << ")\n";
  return result.errors.empty() ? kOk : kPartial;
}

int cmd_split(const Common& c, const SplitArgs& a) {
  const auto scores = io::read_scores(a.scores);
  const auto cohort = io::read_cohort(a.cohort);
  std::map<std::string, const ImageRecord*> by_id;
  for (const auto& r : cohort) by_id.emplace(r.image_id, &r);

  std::vector<ImageRecord> records;
  for (const auto& s : scores) {
    auto it = by_id.find(s.image_id);
    if (it == by_id.end()) {
      throw ContractError(a.scores.string() + ": image '" + s.image_id +
                          "' is absent from the cohort");
    }
    ImageRecord r = *it->second;
    r.contrast_score = s.contrast_score;
    r.contrast_group = s.contrast_group;
    records.push_back(std::move(r));
  }
  const auto grouping = split_by_median(std::move(records));
  const auto table = cross_tab(grouping.records);
  const std::string text = format_cross_tab(table);

  RunManifest m{"split", {a.scores, a.cohort}, {{"rule", "high iff score > median"}}};
  write_output(c.out_dir, "groups.csv", io::groups_csv(grouping), m);
  write_output(c.out_dir, "groups_summary.json", io::groups_summary(grouping).dump(2) + "\n", m);
  write_output(c.out_dir, "crosstab.txt", text, m);

  if (grouping.n_high == 0) {
    err_of(c) << "warning: no score exceeds the median cutoff; every included image is low\n";
  }
  out_of(c) << "median cutoff " << io::format_double(grouping.cutoff) << ": " << grouping.n_high
            << " high, " << grouping.n_low << " low, " << grouping.excluded.size()
            << " excluded\n"
            << text;
  return kOk;
}

int cmd_splits_gen(const Common& c, const SplitsGenArgs& a) {
  if (a.n_seeds == 0) throw ContractError("--seeds must be at least 1");
  const auto records = io::join_groups(io::read_cohort(a.cohort), io::read_groups(a.groups));
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < a.n_seeds; ++i) seeds.push_back(c.seed + i);
  const auto result = make_splits(records, seeds, a.fraction);

  RunManifest m{"splits-gen", {a.groups, a.cohort},
                {{"seeds", seeds},
                 {"fraction", a.fraction},
                 {"generator", "mt19937_64, rejection-bounded Fisher-Yates"},
                 {"strata", "malignant x fst_group x contrast_group"}}};
  write_output(c.out_dir, "splits.csv", io::splits_csv(result.assignments), m);
  for (const auto& w : result.warnings) err_of(c) << "warning: " << w << "\n";

  for (const auto seed : seeds) {
    std::size_t train = 0, eval = 0;
    for (const auto& s : result.assignments) {
      if (s.seed != seed) continue;
      (s.phase == SplitPhase::finetune_train ? train : eval) += 1;
    }
    out_of(c) << "seed " << seed << ": " << train << " train, " << eval << " eval\n";
  }
  return kOk;
}

int cmd_audit(const Common& c, const AuditArgs& a) {
  const auto predictions = io::read_predictions(a.predictions);
  const auto records = io::join_groups(io::read_cohort(a.cohort), io::read_groups(a.groups));
  const AuditAxis axis = parse_audit_axis(a.axis);
  const auto gaps = a.gaps ? parse_gap_list(*a.gaps) : default_gaps(axis);
  AuditOptions opt;
  opt.bootstrap_resamples = a.bootstrap;
  opt.bootstrap_level = a.level;
  opt.bootstrap_seed = c.seed;
  const auto report = subgroup_audit(predictions, records, axis, gaps, opt);

  nlohmann::json gap_list = nlohmann::json::array();
  for (const auto& g : gaps) gap_list.push_back(g.label());
  RunManifest m{"audit", {a.predictions, a.groups, a.cohort},
                {{"axis", to_string(axis)},
                 {"gaps", gap_list},
                 {"error_bar", "sample std over seeds"},
                 {"bootstrap_resamples", a.bootstrap},
                 {"bootstrap_level", a.level},
                 {"seed", c.seed}}};
  const std::string table = format_audit_table(report);
  write_output(c.out_dir, "report.csv", format_audit_csv(report), m);
  write_output(c.out_dir, "report.txt", table, m);
  out_of(c) << table;
  return kOk;
}

int cmd_consistency(const Common& c, const ConsistencyArgs& a) {
  const auto log = io::read_annotation_log(a.annotations);
  const auto rep = consistency_from_log(log, a.labeller_a, a.labeller_b);

  std::string summary = "labeller,n,mean,sd,min,q1,median,q3,max\n";
  for (const auto& [name, s] : {std::pair{rep.labeller_a, rep.summary_a},
                                std::pair{rep.labeller_b, rep.summary_b}}) {
    summary += io::csv_field(name) + "," + std::to_string(s.n) + "," +
               io::format_double(s.mean) + "," + io::format_double(s.sd) + "," +
               io::format_double(s.min) + "," + io::format_double(s.q1) + "," +
               io::format_double(s.median) + "," + io::format_double(s.q3) + "," +
               io::format_double(s.max) + "\n";
  }
  std::string pairs = "image_id,score_" + a.labeller_a + ",score_" + a.labeller_b + "\n";
  for (std::size_t i = 0; i < rep.image_ids.size(); ++i) {
    pairs += io::csv_field(rep.image_ids[i]) + "," + io::format_double(rep.scores_a[i]) + "," +
             io::format_double(rep.scores_b[i]) + "\n";
  }
  const auto& t = rep.ttest;
  const nlohmann::json test = {{"labeller_a", rep.labeller_a},
                               {"labeller_b", rep.labeller_b},
                               {"n", t.n},
                               {"df", t.n - 1},
                               {"mean_diff", t.mean_diff},
                               {"sd_diff", t.sd_diff},
                               {"t", std::isfinite(t.t) ? nlohmann::json(t.t)
                                                         : nlohmann::json(io::format_double(t.t))},
                               {"p_two_sided", t.p},
                               {"degenerate", t.degenerate}};

  RunManifest m{"consistency", {a.annotations},
                {{"labellers", {a.labeller_a, a.labeller_b}}, {"test", "paired t, two-sided"}}};
  write_output(c.out_dir, "consistency_summary.csv", summary, m);
  write_output(c.out_dir, "consistency_pairs.csv", pairs, m);
  write_output(c.out_dir, "consistency_ttest.json", test.dump(2) + "\n", m);

  out_of(c) << summary << "paired t-test over " << t.n << " shared images: t = "
            << io::format_double(t.t) << ", df = " << t.n - 1
            << ", two-sided p = " << io::format_double(t.p)
            << (t.degenerate ? " (zero variance of differences)" : "") << "\n";
  return kOk;
}

int cmd_weights(const Common& c, const WeightsArgs& a) {
  const auto cohort = io::read_cohort(a.cohort);
  std::map<std::string, bool> malignant;
  for (const auto& r : cohort) malignant[r.image_id] = r.malignant;

  auto weights_for = [](const std::vector<bool>& labels, const std::string& what) {
    std::size_t counts[2] = {0, 0};
    for (bool m : labels) ++counts[m ? 1 : 0];
    if (counts[0] == 0 || counts[1] == 0) {
      throw ContractError(what + " has a single class (" + std::to_string(counts[0]) +
                          " benign, " + std::to_string(counts[1]) + " malignant)");
    }
    return class_weights(std::span<const std::size_t>(counts, 2));
  };

  std::string csv;
  std::vector<fs::path> inputs{a.cohort};
  auto emit = [&](const ClassWeights& w, const std::string& prefix) {
    static const char* kNames[2] = {"benign", "malignant"};
    for (int k = 0; k < 2; ++k) {
      csv += prefix + kNames[k] + "," + std::to_string(w.counts[k]) + "," +
             io::format_double(w.weights[k]) + "\n";
      out_of(c) << prefix << kNames[k] << ": count " << w.counts[k] << ", weight "
                << io::format_double(w.weights[k]) << "\n";
    }
  };
  if (!a.splits) {
    csv = "class,count,weight\n";
    std::vector<bool> labels;
    for (const auto& r : cohort) labels.push_back(r.malignant);
    emit(weights_for(labels, "cohort"), "");
  } else {
    inputs.push_back(*a.splits);
    csv = "seed,class,count,weight\n";
    std::map<std::uint64_t, std::vector<bool>> by_seed;
    for (const auto& s : io::read_splits(*a.splits)) {
      if (s.phase != SplitPhase::finetune_train) continue;
      auto it = malignant.find(s.image_id);
      if (it == malignant.end()) {
        throw ContractError("splits name image '" + s.image_id + "' absent from the cohort");
      }
      by_seed[s.seed].push_back(it->second);
    }
    for (const auto& [seed, labels] : by_seed) {
      emit(weights_for(labels, "seed " + std::to_string(seed) + " training set"),
           std::to_string(seed) + ",");
    }
  }
  RunManifest m{"weights", inputs, {{"rule", "w_k = (1/n_k) / sum_j (1/n_j)"}}};
  write_output(c.out_dir, "weights.csv", csv, m);
  return kOk;
}

int cmd_trend(const Common& c, const TrendArgs& a) {
  const auto log = io::read_annotation_log(a.annotations);
  const auto cohort = io::read_cohort(a.cohort);
  const auto trend = background_trend(log, cohort);

  std::string csv = "fst_group,n,mean_r,mean_g,mean_b,mean_luminance\n";
  for (const auto& g : trend.groups) {
    csv += std::string(to_string(g.fst_group)) + "," + std::to_string(g.n) + "," +
           io::format_double(g.mean_color.r) + "," + io::format_double(g.mean_color.g) + "," +
           io::format_double(g.mean_color.b) + "," + io::format_double(g.mean_luminance) + "\n";
  }
  RunManifest m{"trend", {a.annotations, a.cohort},
                {{"verdict_rule", "mean luminance strictly decreasing I-II > III-IV > V-VI"}}};
  write_output(c.out_dir, "trend.csv", csv, m);
  write_output(c.out_dir, "trend_summary.json",
               nlohmann::json{{"monotone_darker", trend.monotone_darker},
                              {"groups", trend.groups.size()},
                              {"unmatched_annotations", trend.unmatched}}
                       .dump(2) +
                   "\n",
               m);
  out_of(c) << csv << "verdict: "
            << (trend.monotone_darker ? "background luminance decreases with darker FST"
                                      : "no strict decrease across FST groups")
            << "\n";
  if (trend.unmatched > 0) {
    err_of(c) << "warning: " << trend.unmatched << " annotation(s) have no cohort record\n";
  }
  return kOk;
}

}  // namespace coco::cli
