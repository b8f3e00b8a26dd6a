#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coco/cli.hpp"
#include "coco/io.hpp"
#include "support/support.hpp"

using namespace coco;
using coco::test::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kGrouped = fs::path(COCO_FIXTURE_DIR) / "grouped656";

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "coco-audit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

// Cohort and log where every image has an annotation from "a" and most from "b".
void write_annotated_cohort(const fs::path& dir, std::size_t n) {
  const auto recs = coco::test::synthetic_cohort(n);
  std::string csv = "image_id,file_path,fst_group,malignant\n";
  std::string log;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    csv += r.image_id + "," + r.file_path + "," + std::string(to_string(r.fst_group)) + "," +
           (r.malignant ? "1" : "0") + "\n";
    const auto fg = static_cast<std::uint8_t>(20 + (i * 37) % 150);
    const auto bg = static_cast<std::uint8_t>(230 - 50 * static_cast<int>(r.fst_group));
    log += io::annotation_to_line(coco::test::uniform_annotation(r.image_id, "a", {fg, fg, fg}, {bg, bg, bg}));
    if (i % 5 != 4) {
      const auto fg2 = static_cast<std::uint8_t>(fg + (i % 2 ? 2 : 0));
      log += io::annotation_to_line(
          coco::test::uniform_annotation(r.image_id, "b", {fg2, fg2, fg2}, {bg, bg, bg}));
    }
  }
  write(dir / "cohort.csv", csv);
  write(dir / "annotations.jsonl", log);
}

}  // namespace

TEST_CASE("sha256 of a known input") {
  TempDir dir;
  write(dir / "abc.txt", "abc");
  CHECK(cli::sha256_file(dir / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("grouped fixture counts through split") {
  TempDir dir;
  std::ostringstream out, err;
  cli::Common c;
  c.out_dir = dir.path();
  c.out = &out;
  c.err = &err;
  cli::SplitArgs a{kGrouped / "scores.csv", kGrouped / "cohort.csv"};
  REQUIRE(cli::cmd_split(c, a) == cli::kOk);
  const auto summary = json::parse(io::read_file(dir / "groups_summary.json"));
  CHECK(summary["n_high"] == 314);
  CHECK(summary["n_low"] == 328);
  CHECK(summary["n_excluded"] == 14);
  CHECK(summary["median"] == 4.7);
  const auto table = io::read_file(dir / "crosstab.txt");
  CHECK(table.find("High          88     134      92     314") != std::string::npos);
  CHECK(table.find("Low          114     103     111     328") != std::string::npos);

  const auto manifest = json::parse(io::read_file(dir / "groups.csv.manifest.json"));
  CHECK(manifest["command"] == "split");
  CHECK(manifest["inputs"][0]["sha256"] == cli::sha256_file(kGrouped / "scores.csv"));
  CHECK(manifest["tool_version"] == cli::tool_version());
}

TEST_CASE("full pipeline through the command line") {
  TempDir dir;
  write_annotated_cohort(dir.path(), 60);
  const std::string d = dir.path().string();
  const std::string out = d + "/out";

  CHECK(run_cli({"--out-dir", out, "score", d + "/cohort.csv", d + "/annotations.jsonl",
                 "--labeller", "a"}) == cli::kOk);
  CHECK(fs::exists(out + "/scores.csv.manifest.json"));
  CHECK(run_cli({"--out-dir", out, "split", out + "/scores.csv", "--cohort", d + "/cohort.csv"}) ==
        cli::kOk);
  CHECK(run_cli({"--out-dir", out, "--seed", "10", "splits-gen", out + "/groups.csv",
                 d + "/cohort.csv", "--seeds", "3"}) == cli::kOk);
  const auto splits = io::read_splits(out + "/splits.csv");
  CHECK(splits.front().seed == 10);
  CHECK(splits.back().seed == 12);
  const std::string first = io::read_file(out + "/splits.csv");
  CHECK(run_cli({"--out-dir", out, "--seed", "10", "splits-gen", out + "/groups.csv",
                 d + "/cohort.csv", "--seeds", "3"}) == cli::kOk);
  CHECK(io::read_file(out + "/splits.csv") == first);

  // Predictions: probability follows the label so every defined cell has AUC 1.
  const auto cohort = io::read_cohort(d + "/cohort.csv");
  std::vector<PredictionRecord> preds;
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    for (const auto& r : cohort) {
      preds.push_back({r.image_id, "net", seed, EvalPhase::ood_eval, r.malignant ? 0.9 : 0.1});
    }
  }
  write(d + "/predictions.csv", io::predictions_csv(preds));
  CHECK(run_cli({"--out-dir", out, "audit", d + "/predictions.csv", out + "/groups.csv",
                 d + "/cohort.csv", "--axis", "contrast-x-fst", "--gaps", "high/V-VI:low/V-VI"}) ==
        cli::kOk);
  const auto report = io::read_csv(out + "/report.csv");
  CHECK(report.header.back() == "n_seeds");
  bool saw_gap = false;
  for (const auto& row : report.rows) {
    if (row[3] == "gap:high/V-VI-low/V-VI") {
      saw_gap = true;
      CHECK(row[4] == "0");
    } else {
      // single-class cells may be undefined, but never anything but perfect
      CHECK((row[4] == "1" || row[4] == "NA"));
    }
  }
  CHECK(saw_gap);
  CHECK(run_cli({"--out-dir", out, "--seed", "1", "audit", d + "/predictions.csv",
                 out + "/groups.csv", d + "/cohort.csv", "--bootstrap", "200"}) == cli::kOk);
  CHECK(io::read_csv(out + "/report.csv").header.back() == "ci_hi");

  CHECK(run_cli({"--out-dir", out, "consistency", d + "/annotations.jsonl", "--labellers", "a,b"}) ==
        cli::kOk);
  const auto t = json::parse(io::read_file(out + "/consistency_ttest.json"));
  CHECK(t["n"] == 48);

  CHECK(run_cli({"--out-dir", out, "weights", d + "/cohort.csv"}) == cli::kOk);
  CHECK(io::read_csv(out + "/weights.csv").rows.size() == 2);
  CHECK(run_cli({"--out-dir", out, "weights", d + "/cohort.csv", "--splits", out + "/splits.csv"}) ==
        cli::kOk);
  CHECK(io::read_csv(out + "/weights.csv").rows.size() == 6);

  CHECK(run_cli({"--out-dir", out, "trend", d + "/annotations.jsonl", d + "/cohort.csv"}) ==
        cli::kOk);
  CHECK(json::parse(io::read_file(out + "/trend_summary.json"))["monotone_darker"] == true);
}

TEST_CASE("exit codes") {
  TempDir dir;
  write_annotated_cohort(dir.path(), 12);
  const std::string d = dir.path().string();

  // Partial: one record has no annotation.
  std::ofstream(d + "/cohort.csv", std::ios::app) << "extra,extra.png,I-II,0\n";
  CHECK(run_cli({"--out-dir", d + "/o", "score", d + "/cohort.csv", d + "/annotations.jsonl",
                 "--labeller", "a"}) == cli::kPartial);
  CHECK(io::read_csv(d + "/o/scores.csv").rows.size() == 12);

  CHECK(run_cli({"--out-dir", d + "/o", "score", d + "/cohort.csv", d + "/annotations.jsonl",
                 "--labeller", "nobody"}) == cli::kContractError);
  CHECK(run_cli({"score", d + "/missing.csv", d + "/annotations.jsonl", "--labeller", "a"}) ==
        cli::kContractError);
  CHECK(run_cli({"bogus"}) == cli::kContractError);
  CHECK(run_cli({}) == cli::kContractError);

  write(d + "/bad.csv", "image_id,file_path,fst_group,malignant\nx,x.png,VIII,1\n");
  CHECK(run_cli({"score", d + "/bad.csv", d + "/annotations.jsonl", "--labeller", "a"}) ==
        cli::kContractError);
  CHECK(run_cli({"--out-dir", d + "/o", "audit", d + "/cohort.csv", d + "/cohort.csv",
                 d + "/cohort.csv"}) == cli::kContractError);
}

TEST_CASE("config file supplies options") {
  TempDir dir;
  write_annotated_cohort(dir.path(), 9);
  const std::string d = dir.path().string();
  write(d + "/run.toml", "out-dir = \"" + d + "/cfg\"\n");
  CHECK(run_cli({"--config", d + "/run.toml", "score", d + "/cohort.csv", d + "/annotations.jsonl",
                 "--labeller", "a"}) == cli::kOk);
  CHECK(fs::exists(d + "/cfg/scores.csv"));
}
