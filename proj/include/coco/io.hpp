#pragma once

// File contracts between pipeline stages.
//
//   cohort.csv       image_id,file_path,fst_group,malignant
//   scores.csv       image_id,contrast_score,l_lighter,l_darker,excluded
//   exclusions.csv   image_id,contrast_score,l_lighter,l_darker,l_min
//   groups.csv       image_id,contrast_score,contrast_group,cutoff
//   splits.csv       image_id,seed,phase
//   predictions.csv  image_id,model_id,seed,phase,malignant_prob
//   annotations      JSON Lines, one PointAnnotation per line
//
// Real numbers are written in shortest round-trip form, so re-reading an
// output reproduces the exact doubles.

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coco/audit.hpp"
#include "coco/cohort.hpp"

namespace coco::io {

namespace fs = std::filesystem;

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Index of a header column; throws ContractError naming the source.
  std::size_t column(std::string_view name) const;
  // "<source>:<line>: " prefix for row-level errors.
  std::string where(std::size_t row) const;
};

// RFC 4180 style: quoted fields, doubled quotes, CRLF tolerated, blank lines
// skipped. Every row must have as many fields as the header.
CsvTable parse_csv(std::string_view text, std::string source = "<memory>");
CsvTable read_csv(const fs::path& path);

std::string csv_field(std::string_view s);
std::string format_double(double v);
double parse_double(std::string_view s, const std::string& where);
std::uint64_t parse_uint(std::string_view s, const std::string& where);

std::string read_file(const fs::path& path);
// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const fs::path& path, std::string_view content);
std::string utc_timestamp();

std::vector<ImageRecord> read_cohort(const fs::path& path);
std::vector<ImageRecord> parse_cohort(const CsvTable& t);

std::string scores_csv(std::span<const ImageRecord> records, double l_min);
std::string exclusions_csv(std::span<const ImageRecord> records, double l_min);
// Records carry image_id and contrast score; excluded rows are marked.
std::vector<ImageRecord> read_scores(const fs::path& path);
std::vector<ImageRecord> parse_scores(const CsvTable& t);

std::string groups_csv(const GroupingResult& g);
nlohmann::json groups_summary(const GroupingResult& g);

struct GroupRow {
  double contrast_score = 0.0;
  ContrastGroup group = ContrastGroup::low;
};
std::map<std::string, GroupRow> read_groups(const fs::path& path);
std::map<std::string, GroupRow> parse_groups(const CsvTable& t);

// Attaches scores and groups to cohort records. Cohort records without a
// group row stay ungrouped; group rows for unknown images are an error.
std::vector<ImageRecord> join_groups(std::vector<ImageRecord> cohort,
                                     const std::map<std::string, GroupRow>& groups);

std::string splits_csv(std::span<const SplitAssignment> splits);
std::vector<SplitAssignment> read_splits(const fs::path& path);
std::vector<SplitAssignment> parse_splits(const CsvTable& t);

std::vector<PredictionRecord> read_predictions(const fs::path& path);
std::vector<PredictionRecord> parse_predictions(const CsvTable& t);
std::string predictions_csv(std::span<const PredictionRecord> predictions);

nlohmann::json annotation_to_json(const PointAnnotation& a);
// Throws ContractError on schema problems (missing fields, bad types).
PointAnnotation annotation_from_json(const nlohmann::json& j);
std::string annotation_to_line(const PointAnnotation& a);

std::vector<PointAnnotation> parse_annotation_log(std::string_view text,
                                                  const std::string& source);
std::vector<PointAnnotation> read_annotation_log(const fs::path& path);

}  // namespace coco::io
