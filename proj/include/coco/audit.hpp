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

enum class EvalPhase { ood_eval, finetune_eval };
std::string_view to_string(EvalPhase p);
EvalPhase parse_eval_phase(std::string_view s);

// One externally produced model output.
struct PredictionRecord {
  std::string image_id;
  std::string model_id;
  std::uint64_t seed = 0;
  EvalPhase phase = EvalPhase::ood_eval;
  double malignant_prob = 0.0;
};

// Throws ContractError on a probability outside [0, 1] or a repeated
// (image_id, model_id, seed, phase) key.
void validate_predictions(std::span<const PredictionRecord> predictions);

enum class AuditAxis { contrast, fst, contrast_x_fst };
std::string_view to_string(AuditAxis a);
AuditAxis parse_audit_axis(std::string_view s);

// Subgroup names valid on an axis, in report order. contrast_x_fst names are
// "<contrast>/<fst>", e.g. "high/V-VI".
std::vector<std::string> axis_subgroups(AuditAxis axis);

struct GapPair {
  std::string a;
  std::string b;

  std::string label() const { return "gap:" + a + "-" + b; }
};

// high-low on the contrast axis; V-VI minus I-II on the skin-tone axis.
std::vector<GapPair> default_gaps(AuditAxis axis);

// Parses "A:B[,C:D...]".
std::vector<GapPair> parse_gap_list(std::string_view s);

struct AuditOptions {
  std::size_t bootstrap_resamples = 0;  // 0 disables intervals
  double bootstrap_level = 0.95;
  std::uint64_t bootstrap_seed = 0;
};

struct AuditCell {
  std::string model_id;
  EvalPhase phase = EvalPhase::ood_eval;
  AuditAxis axis = AuditAxis::contrast;
  std::string subgroup;
  std::map<std::uint64_t, double> seed_auc;  // defined seeds only
  std::vector<std::string> undefined;        // one message per undefined seed
  std::optional<double> mean_auc;            // mean of seed_auc
  std::optional<double> std_auc;             // sample std over seeds; 0 for one seed
  std::size_t n_images = 0;                  // distinct images over all seeds
  std::optional<std::pair<double, double>> ci;
};

struct AuditGap {
  std::string model_id;
  EvalPhase phase = EvalPhase::ood_eval;
  AuditAxis axis = AuditAxis::contrast;
  GapPair pair;
  std::optional<double> gap;      // mean(a) - mean(b)
  std::optional<double> std_gap;  // std of per-seed differences
  std::size_t n_seeds = 0;        // seeds defined in both cells
};

struct AuditReport {
  AuditAxis axis = AuditAxis::contrast;
  std::vector<AuditCell> cells;
  std::vector<AuditGap> gaps;
  std::size_t unjoined_predictions = 0;
  bool with_ci = false;
};

// Per-seed AUC per (model, phase, subgroup), aggregated over seeds. Records
// must carry a contrast group; excluded records are left out. Subgroups with
// no records are absent; single-class cells are marked undefined and the run
// continues. Throws ContractError when no prediction joins a record or a gap
// names a subgroup not on the axis.
AuditReport subgroup_audit(std::span<const PredictionRecord> predictions,
                           std::span<const ImageRecord> records, AuditAxis axis,
                           std::span<const GapPair> gaps,
                           const AuditOptions& options = {});

// Machine-readable report:
// model_id,phase,axis,subgroup,mean_auc,std_auc,n_images,n_seeds[,ci_lo,ci_hi]
std::string format_audit_csv(const AuditReport& report);

// Table text with subgroups as rows and models as columns, one table per
// phase, gap rows last.
std::string format_audit_table(const AuditReport& report);

}  // namespace coco
