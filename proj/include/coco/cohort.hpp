#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coco/color.hpp"

namespace coco {

enum class FstGroup { I_II, III_IV, V_VI };
enum class ContrastGroup { high, low, excluded };

inline constexpr std::array<FstGroup, 3> kFstGroups = {
    FstGroup::I_II, FstGroup::III_IV, FstGroup::V_VI};

std::string_view to_string(FstGroup g);
std::string_view to_string(ContrastGroup g);
// Throw ContractError on unknown names.
FstGroup parse_fst_group(std::string_view s);
ContrastGroup parse_contrast_group(std::string_view s);

struct Pick {
  int x = 0;
  int y = 0;
  SrgbColor color;
};

inline constexpr int kAnnotationSchemaVersion = 1;

// One labeller's picks on one image. The colors are the server-side pixel
// values at the pick coordinates.
struct PointAnnotation {
  int schema_version = kAnnotationSchemaVersion;
  std::string image_id;
  std::string labeller_id;
  std::vector<Pick> foreground;
  std::vector<Pick> background;
  bool lighting_flag = false;
  nlohmann::json checklist = nlohmann::json::object();
  int patch_size = 1;
  std::string created_at;
};

// Throws ProtocolViolation unless the annotation has exactly 3 + 3 picks,
// all inside a width x height image, with disjoint foreground and background
// coordinates and the lighting attestation set.
void validate_annotation(const PointAnnotation& a, int width, int height);

AveragedColor average_foreground(const PointAnnotation& a);
AveragedColor average_background(const PointAnnotation& a);

struct ImageRecord {
  std::string image_id;
  std::string file_path;
  FstGroup fst_group = FstGroup::I_II;
  bool malignant = false;
  std::optional<ContrastScore> contrast_score;
  std::optional<ContrastGroup> contrast_group;
};

// Latest annotation per (image, labeller) in log order.
std::vector<PointAnnotation> latest_annotations(
    std::span<const PointAnnotation> log);
std::map<std::string, PointAnnotation> latest_for_labeller(
    std::span<const PointAnnotation> log, std::string_view labeller_id);

struct RecordError {
  std::string image_id;
  std::string message;
};

struct ScoringResult {
  std::vector<ImageRecord> records;  // input order, scored where possible
  std::vector<RecordError> errors;   // records left without a score
};

// Scores each record from the labeller's latest annotation. Missing
// annotations are reported per record; scoring continues for the others.
ScoringResult score_cohort(std::span<const ImageRecord> records,
                           std::span<const PointAnnotation> annotations,
                           std::string_view labeller_id);

// Batch form used by score_cohort: contrast of each fg/bg pair through the
// runtime-selected kernels. Output is bit-identical to contrast_ratio().
std::vector<ContrastScore> batch_contrast(std::span<const AveragedColor> fg,
                                          std::span<const AveragedColor> bg);

// Marks abnormal-score records as excluded. Returns their ids.
std::vector<std::string> apply_exclusions(std::vector<ImageRecord>& records,
                                          double l_min = kDefaultLuminanceFloor);

struct GroupingResult {
  std::vector<ImageRecord> records;
  double cutoff = 0.0;  // median of included scores
  std::size_t n_high = 0;
  std::size_t n_low = 0;
  std::vector<std::string> excluded;
};

double median(std::vector<double> values);

// Median cutoff over records not already excluded. high iff score > median,
// ties go to low. Throws ContractError if an included record is unscored or
// nothing is included.
GroupingResult split_by_median(std::vector<ImageRecord> records);

struct CrossTab {
  // counts[contrast][fst] for contrast in {high, low}
  std::array<std::array<std::size_t, 3>, 2> counts{};
  std::size_t excluded = 0;

  std::size_t cell(ContrastGroup c, FstGroup f) const;
  std::size_t row_total(ContrastGroup c) const;
  std::size_t column_total(FstGroup f) const;
  std::size_t total() const;
};

CrossTab cross_tab(std::span<const ImageRecord> records);

// Table-1 style text: rows high/low, columns I-II, III-IV, V-VI, Total.
std::string format_cross_tab(const CrossTab& t);

enum class SplitPhase { finetune_train, finetune_eval };
std::string_view to_string(SplitPhase p);
SplitPhase parse_split_phase(std::string_view s);

struct SplitAssignment {
  std::string image_id;
  std::uint64_t seed = 0;
  SplitPhase phase = SplitPhase::finetune_train;

  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

struct SplitResult {
  std::vector<SplitAssignment> assignments;  // seed-major, image_id order
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultTrainFraction = 0.8;

// Training count for a stratum of n records: round(fraction * n), clamped to
// [1, n - 1] so every stratum of two or more keeps one evaluation image.
std::size_t stratum_train_count(std::size_t n, double fraction);

// Deterministic stratified split per seed over strata
// malignant x fst_group x contrast_group. Excluded and ungrouped records are
// left out. Independent of input record order.
SplitResult make_splits(std::span<const ImageRecord> records,
                        std::span<const std::uint64_t> seeds,
                        double train_fraction = kDefaultTrainFraction);

}  // namespace coco
