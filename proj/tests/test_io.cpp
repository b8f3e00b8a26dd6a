#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "coco/errors.hpp"
#include "coco/io.hpp"
#include "support/support.hpp"

using namespace coco;
using coco::test::TempDir;

TEST_CASE("csv quoting, CRLF and blank lines") {
  const auto t = io::parse_csv("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n\r\n\"multi\nline\",2\n");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "x,1");
  CHECK(t.rows[0][1] == "say \"hi\"");
  CHECK(t.rows[1][0] == "multi\nline");
  CHECK(t.line_numbers[0] == 2);
  CHECK(t.line_numbers[1] == 4);
  CHECK(t.column("b") == 1);
}

TEST_CASE("csv without trailing newline and with empty fields") {
  const auto t = io::parse_csv("a,b,c\n,,\n1,,3");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"", "", ""});
  CHECK(t.rows[1][2] == "3");
}

TEST_CASE("csv errors carry the source and line") {
  CHECK_THROWS_WITH_AS(io::parse_csv("a,b\n1,2\n3\n", "f.csv"), "f.csv:3: expected 2 fields, got 1",
                       ContractError);
  CHECK_THROWS_AS(io::parse_csv("a\n\"open\n"), ContractError);
  CHECK_THROWS_AS(io::parse_csv(""), ContractError);
  CHECK_THROWS_AS(io::parse_csv("a\n1\n").column("b"), ContractError);
}

TEST_CASE("csv field escaping round trips") {
  std::mt19937_64 rng(51);
  const std::string alphabet = "ab,\"\n\r x";
  for (int i = 0; i < 200; ++i) {
    std::string s;
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t k = 0; k < n; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
    const auto t = io::parse_csv("h,z\n" + io::csv_field(s) + ",1\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == s);
  }
}

TEST_CASE("doubles round trip exactly") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(1.0, 21.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(io::parse_double(io::format_double(v), "") == v);
  }
  CHECK(io::format_double(std::nan("")) == "NA");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(io::parse_double("inf", "") == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(io::parse_double("1.5x", "at: "), ContractError);
  CHECK_THROWS_AS(io::parse_double("", ""), ContractError);
  CHECK_THROWS_AS(io::parse_uint("-3", ""), ContractError);
  CHECK(io::parse_uint("18446744073709551615", "") == 18446744073709551615ull);
}

TEST_CASE("cohort parsing") {
  const auto t = io::parse_csv(
      "image_id,file_path,fst_group,malignant\n"
      "a,a.png,I-II,1\n"
      "b,b.png,V-VI,0\n");
  const auto c = io::parse_cohort(t);
  REQUIRE(c.size() == 2);
  CHECK(c[0].malignant);
  CHECK(c[1].fst_group == FstGroup::V_VI);

  CHECK_THROWS_AS(io::parse_cohort(io::parse_csv("image_id,file_path,fst_group,malignant\na,x,I-II,2\n")),
                  ContractError);
  CHECK_THROWS_AS(io::parse_cohort(io::parse_csv("image_id,file_path,fst_group,malignant\na,x,VII,1\n")),
                  ContractError);
  CHECK_THROWS_AS(io::parse_cohort(io::parse_csv(
                      "image_id,file_path,fst_group,malignant\na,x,I-II,1\na,y,I-II,0\n")),
                  ContractError);
  CHECK_THROWS_AS(io::parse_cohort(io::parse_csv("image_id,fst_group,malignant\na,I-II,1\n")),
                  ContractError);
}

TEST_CASE("scores survive a write and read") {
  auto recs = coco::test::synthetic_cohort(20);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& r : recs) r.contrast_score = contrast_from_luminance(u(rng), u(rng) * 0.05);
  const auto text = io::scores_csv(recs, 0.01);
  const auto back = io::parse_scores(io::parse_csv(text));
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].contrast_score->value == recs[i].contrast_score->value);
    CHECK(back[i].contrast_score->darker == recs[i].contrast_score->darker);
    const bool ex = is_abnormal_score(*recs[i].contrast_score, 0.01);
    CHECK((back[i].contrast_group == ContrastGroup::excluded) == ex);
  }
  const auto ex_text = io::exclusions_csv(recs, 0.01);
  CHECK(ex_text.rfind("image_id,contrast_score,l_lighter,l_darker,l_min\n", 0) == 0);
  CHECK_THROWS_AS(io::parse_scores(io::parse_csv(
                      "image_id,contrast_score,l_lighter,l_darker,excluded\na,0.5,0.1,0.1,0\n")),
                  ContractError);
}

TEST_CASE("groups and splits round trip") {
  const auto g = split_by_median(coco::test::grouped_cohort(30));
  const auto rows = io::parse_groups(io::parse_csv(io::groups_csv(g)));
  CHECK(rows.size() == 30);
  auto cohort = coco::test::synthetic_cohort(31);
  const auto joined = io::join_groups(cohort, rows);
  CHECK_FALSE(joined[30].contrast_group);
  CHECK(joined[0].contrast_group == g.records[0].contrast_group);
  CHECK_THROWS_AS(io::join_groups(coco::test::synthetic_cohort(5), rows), ContractError);

  const auto s = io::groups_summary(g);
  CHECK(s["n_high"].get<std::size_t>() + s["n_low"].get<std::size_t>() == 30);

  const std::vector<std::uint64_t> seeds = {3, 4};
  const auto splits = make_splits(g.records, seeds);
  CHECK(io::parse_splits(io::parse_csv(io::splits_csv(splits.assignments))) == splits.assignments);
  CHECK_THROWS_AS(io::parse_splits(io::parse_csv("image_id,seed,phase\na,1,finetune_train\na,1,finetune_eval\n")),
                  ContractError);
}

TEST_CASE("predictions round trip and validate") {
  const std::vector<PredictionRecord> p = {{"a", "m,1", 2, EvalPhase::finetune_eval, 0.125},
                                           {"b", "m2", 0, EvalPhase::ood_eval, 1.0}};
  const auto back = io::parse_predictions(io::parse_csv(io::predictions_csv(p)));
  REQUIRE(back.size() == 2);
  CHECK(back[0].model_id == "m,1");
  CHECK(back[0].phase == EvalPhase::finetune_eval);
  CHECK(back[1].malignant_prob == 1.0);
  CHECK_THROWS_AS(io::parse_predictions(io::parse_csv(
                      "image_id,model_id,seed,phase,malignant_prob\na,m,0,ood_eval,1.5\n")),
                  ContractError);
}

TEST_CASE("annotation json round trip") {
  auto a = coco::test::uniform_annotation("img", "lab", {1, 2, 3}, {200, 201, 202});
  a.checklist = {{"no_hair", true}};
  a.patch_size = 3;
  a.created_at = "2024-01-01T00:00:00Z";
  const auto b = io::annotation_from_json(nlohmann::json::parse(io::annotation_to_line(a)));
  CHECK(b.image_id == a.image_id);
  CHECK(b.patch_size == 3);
  CHECK(b.checklist == a.checklist);
  CHECK(b.background[2].color == a.background[2].color);
  CHECK(b.foreground[1].x == a.foreground[1].x);
  const auto line = io::annotation_to_line(a);
  CHECK(line.find('\n') == line.size() - 1);

  auto j = io::annotation_to_json(a);
  j.erase("labeller_id");
  CHECK_THROWS_AS(io::annotation_from_json(j), ContractError);
  j = io::annotation_to_json(a);
  j["foreground"] = "nope";
  CHECK_THROWS_AS(io::annotation_from_json(j), ContractError);
}

TEST_CASE("annotation log parsing reports line numbers") {
  const auto a = coco::test::uniform_annotation("img", "lab", {1, 2, 3}, {4, 5, 6});
  const std::string line = io::annotation_to_line(a);
  const auto log = io::parse_annotation_log(line + "\n" + line, "log");
  CHECK(log.size() == 2);
  CHECK_THROWS_WITH_AS(io::parse_annotation_log(line + "{broken\n", "log"),
                       doctest::Contains("log:2"), ContractError);
}

TEST_CASE("atomic writes replace contents") {
  TempDir dir;
  const auto p = dir / "out.txt";
  io::write_file_atomic(p, "first");
  io::write_file_atomic(p, "second");
  CHECK(io::read_file(p) == "second");
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), ContractError);
  const auto ts = io::utc_timestamp();
  CHECK(ts.size() == 20);
  CHECK(ts.back() == 'Z');
}
