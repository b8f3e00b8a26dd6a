#pragma once

// Command implementations behind the coco-audit executable. Each command
// reads its inputs from files, writes CSV/JSON outputs atomically into the
// output directory with a <name>.manifest.json sidecar, and returns a
// process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coco/color.hpp"
#include "coco/stats.hpp"

namespace coco::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kContractError = 2, kPartial = 3 };

struct Common {
  fs::path out_dir = ".";
  std::uint64_t seed = 0;
  std::ostream* out = nullptr;  // defaults to std::cout
  std::ostream* err = nullptr;  // defaults to std::cerr
};

struct ScoreArgs {
  fs::path cohort;
  fs::path annotations;
  std::string labeller;
  double l_min = kDefaultLuminanceFloor;
};

struct SplitArgs {
  fs::path scores;
  fs::path cohort;
};

struct AuditArgs {
  fs::path predictions;
  fs::path groups;
  fs::path cohort;
  std::string axis = "contrast";
  std::optional<std::string> gaps;  // "A:B,..."; axis defaults when absent
  std::size_t bootstrap = 0;
  double level = kDefaultBootstrapLevel;
};

struct ConsistencyArgs {
  fs::path annotations;
  std::string labeller_a;
  std::string labeller_b;
};

struct SplitsGenArgs {
  fs::path groups;
  fs::path cohort;
  std::size_t n_seeds = 5;
  double fraction = 0.8;
};

struct WeightsArgs {
  fs::path cohort;
  std::optional<fs::path> splits;  // per-seed weights over finetune_train
};

struct TrendArgs {
  fs::path annotations;
  fs::path cohort;
};

int cmd_score(const Common& c, const ScoreArgs& a);
int cmd_split(const Common& c, const SplitArgs& a);
int cmd_audit(const Common& c, const AuditArgs& a);
int cmd_consistency(const Common& c, const ConsistencyArgs& a);
int cmd_splits_gen(const Common& c, const SplitsGenArgs& a);
int cmd_weights(const Common& c, const WeightsArgs& a);
int cmd_trend(const Common& c, const TrendArgs& a);

// Sidecar manifest for one output file.
struct RunManifest {
  std::string command;
  std::vector<fs::path> inputs;
  nlohmann::json config = nlohmann::json::object();
};

std::string sha256_file(const fs::path& path);
nlohmann::json manifest_json(const RunManifest& m);
// Writes `content` to out_dir/name atomically plus name.manifest.json.
void write_output(const fs::path& out_dir, const std::string& name,
                  const std::string& content, const RunManifest& m);

std::string tool_version();

// Full command-line entry point (CLI11).
int run(int argc, char** argv);

}  // namespace coco::cli
