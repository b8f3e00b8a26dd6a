#pragma once

// Shared test fixtures: temporary directories, synthetic cohorts and
// annotations, and predictions with a prescribed AUC.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "coco/audit.hpp"
#include "coco/cohort.hpp"

namespace coco::test {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("coco-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string image_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "img%04zu", i);
  return buf;
}

inline PointAnnotation uniform_annotation(const std::string& image, const std::string& labeller,
                                          SrgbColor fg, SrgbColor bg) {
  PointAnnotation a;
  a.image_id = image;
  a.labeller_id = labeller;
  a.lighting_flag = true;
  for (int k = 0; k < 3; ++k) {
    a.foreground.push_back({10 + k, 10, fg});
    a.background.push_back({40 + k, 40, bg});
  }
  return a;
}

// Cohort of n records cycling through skin-tone groups, with a roughly
// one-third malignant rate.
inline std::vector<ImageRecord> synthetic_cohort(std::size_t n, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::vector<ImageRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    ImageRecord r;
    r.image_id = image_id(i);
    r.file_path = r.image_id + ".png";
    r.fst_group = kFstGroups[i % 3];
    r.malignant = (rng() % 3) == 0;
    out.push_back(r);
  }
  return out;
}

// Scores and median groups attached directly, for split/audit tests.
inline std::vector<ImageRecord> grouped_cohort(std::size_t n, std::uint64_t seed = 7) {
  auto recs = synthetic_cohort(n, seed);
  std::mt19937_64 rng(seed + 1);
  for (auto& r : recs) {
    const double v = 1.0 + static_cast<double>(rng() % 10000) / 1000.0;
    r.contrast_score = ContrastScore{v, 0.5, 0.1};
  }
  return split_by_median(recs).records;
}

// Scores for `n_pos` positives and `n_neg` negatives giving exactly
// wins / (n_pos * n_neg) as AUC, no ties. Requires wins <= n_pos * n_neg.
inline std::vector<double> scores_with_auc(std::size_t n_pos, std::size_t n_neg,
                                           std::size_t wins,
                                           std::vector<std::uint8_t>& labels) {
  labels.clear();
  std::vector<double> scores;
  const double scale = static_cast<double>(n_neg + 1);
  for (std::size_t j = 0; j < n_neg; ++j) {
    labels.push_back(0);
    scores.push_back((static_cast<double>(j) + 1.0) / scale);
  }
  const std::size_t q = wins / n_pos;
  const std::size_t r = wins % n_pos;
  for (std::size_t i = 0; i < n_pos; ++i) {
    const std::size_t below = q + (i < r ? 1 : 0);  // negatives beneath this positive
    labels.push_back(1);
    // Between negative #below and #below+1; distinct across positives.
    scores.push_back((static_cast<double>(below) + 0.5 + 0.001 * static_cast<double>(i) / n_pos) /
                     scale);
  }
  return scores;
}

struct SyntheticAudit {
  std::vector<ImageRecord> records;
  std::vector<PredictionRecord> predictions;
};

// Appends one cell of 25 malignant and 40 benign images. Each model's
// predictions give AUC wins / 1000 on the cell, identical for every seed.
inline void add_audit_cell(SyntheticAudit& fx, FstGroup fst, ContrastGroup contrast,
                           const std::vector<std::pair<std::string, std::size_t>>& model_wins,
                           std::size_t n_seeds = 1, EvalPhase phase = EvalPhase::ood_eval) {
  const std::size_t base = fx.records.size();
  std::vector<std::uint8_t> labels;
  bool first = true;
  for (const auto& [model, wins] : model_wins) {
    const auto scores = scores_with_auc(25, 40, wins, labels);
    if (first) {
      for (std::size_t i = 0; i < labels.size(); ++i) {
        ImageRecord r;
        r.image_id = image_id(base + i);
        r.fst_group = fst;
        r.malignant = labels[i] != 0;
        r.contrast_group = contrast;
        fx.records.push_back(r);
      }
      first = false;
    }
    for (std::size_t seed = 0; seed < n_seeds; ++seed) {
      for (std::size_t i = 0; i < scores.size(); ++i) {
        fx.predictions.push_back({image_id(base + i), model, seed, phase, scores[i]});
      }
    }
  }
}

}  // namespace coco::test
