#include <iostream>

#include <CLI11.hpp>

#include "coco/cli.hpp"
#include "coco/errors.hpp"
#include "coco/service.hpp"

namespace coco::cli {

namespace {

// "host:port" or ":port" or "port".
void parse_listen(const std::string& s, ServeConfig& cfg) {
  const auto colon = s.rfind(':');
  const std::string host = colon == std::string::npos ? "" : s.substr(0, colon);
  const std::string port = colon == std::string::npos ? s : s.substr(colon + 1);
  if (!host.empty()) cfg.host = host;
  try {
    std::size_t used = 0;
    cfg.port = std::stoi(port, &used);
    if (used != port.size() || cfg.port < 0 || cfg.port > 65535) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ContractError("invalid listen address '" + s + "'");
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Lesion-skin contrast scoring and subgroup bias audit"};
  app.set_version_flag("--version", tool_version());
  app.set_config("--config", "", "TOML/INI file supplying option values");
  app.require_subcommand(1);

  Common common;
  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--seed", common.seed, "Base seed for splits and bootstrap")
      ->capture_default_str();

  ScoreArgs score;
  auto* s_score = app.add_subcommand("score", "Score a cohort from an annotation log");
  s_score->add_option("cohort", score.cohort, "cohort.csv")->required()->check(CLI::ExistingFile);
  s_score->add_option("annotations", score.annotations, "annotations.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  s_score->add_option("--labeller", score.labeller, "Primary labeller id")->required();
  s_score->add_option("--l-min", score.l_min, "Luminance floor for abnormal scores")
      ->capture_default_str();

  SplitArgs split;
  auto* s_split = app.add_subcommand("split", "Group scored images by the median cutoff");
  s_split->add_option("scores", split.scores, "scores.csv")->required()->check(CLI::ExistingFile);
  s_split->add_option("--cohort", split.cohort, "cohort.csv (skin-tone columns of the table)")
      ->required()
      ->check(CLI::ExistingFile);

  AuditArgs audit;
  std::string gaps;
  auto* s_audit = app.add_subcommand("audit", "Per-subgroup AUC over seeds from predictions");
  s_audit->add_option("predictions", audit.predictions, "predictions.csv")
      ->required()
      ->check(CLI::ExistingFile);
  s_audit->add_option("groups", audit.groups, "groups.csv")->required()->check(CLI::ExistingFile);
  s_audit->add_option("cohort", audit.cohort, "cohort.csv")->required()->check(CLI::ExistingFile);
  s_audit->add_option("--axis", audit.axis, "contrast | fst | contrast-x-fst")
      ->capture_default_str();
  auto* gaps_opt = s_audit->add_option("--gaps", gaps, "Gap pairs A:B[,C:D]");
  s_audit->add_option("--bootstrap", audit.bootstrap, "Bootstrap resamples (0 = off)")
      ->capture_default_str();
  s_audit->add_option("--level", audit.level, "Bootstrap interval level")->capture_default_str();

  ConsistencyArgs cons;
  std::vector<std::string> labellers;
  auto* s_cons = app.add_subcommand("consistency", "Paired t-test between two labellers");
  s_cons->add_option("annotations", cons.annotations, "annotations.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  s_cons->add_option("--labellers", labellers, "Two labeller ids, comma separated")
      ->required()
      ->delimiter(',')
      ->expected(2);

  SplitsGenArgs sg;
  auto* s_sg = app.add_subcommand("splits-gen", "Seeded stratified fine-tuning splits");
  s_sg->add_option("groups", sg.groups, "groups.csv")->required()->check(CLI::ExistingFile);
  s_sg->add_option("cohort", sg.cohort, "cohort.csv")->required()->check(CLI::ExistingFile);
  s_sg->add_option("--seeds", sg.n_seeds, "Number of seeds, starting at --seed")
      ->capture_default_str();
  s_sg->add_option("--fraction", sg.fraction, "Training fraction")->capture_default_str();

  WeightsArgs weights;
  std::string weights_splits;
  auto* s_w = app.add_subcommand("weights", "Inverse-frequency class weights");
  s_w->add_option("cohort", weights.cohort, "cohort.csv")->required()->check(CLI::ExistingFile);
  auto* w_splits = s_w->add_option("--splits", weights_splits, "splits.csv for per-seed weights")
                       ->check(CLI::ExistingFile);

  TrendArgs trend;
  auto* s_trend = app.add_subcommand("trend", "Background color by skin-tone group");
  s_trend->add_option("annotations", trend.annotations, "annotations.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  s_trend->add_option("cohort", trend.cohort, "cohort.csv")->required()->check(CLI::ExistingFile);

  ServeConfig serve_cfg;
  std::string listen = "127.0.0.1:8080";
  std::string cohort_path, image_root, log_path, ui_dir;
  auto* s_serve = app.add_subcommand("serve", "Run the annotation service");
  s_serve->add_option("--listen", listen, "host:port")->envname("COCO_LISTEN")->capture_default_str();
  s_serve->add_option("--cohort", cohort_path, "cohort.csv")->envname("COCO_COHORT")->required();
  s_serve->add_option("--image-root", image_root, "Directory holding cohort images")
      ->envname("COCO_IMAGE_ROOT")
      ->required();
  s_serve->add_option("--log", log_path, "Append-only annotation log (JSON Lines)")
      ->envname("COCO_LOG")
      ->required();
  s_serve->add_option("--patch-size", serve_cfg.options.patch_size,
                      "Odd square median patch per pick (1 = single pixel)")
      ->envname("COCO_PATCH_SIZE")
      ->capture_default_str();
  s_serve->add_option("--l-min", serve_cfg.options.l_min, "Luminance floor flag in responses")
      ->envname("COCO_L_MIN")
      ->capture_default_str();
  auto* ui_opt = s_serve->add_option("--ui-dir", ui_dir, "Static annotation UI to serve at /")
                     ->envname("COCO_UI_DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kContractError;
  }

  common.out_dir = out_dir;
  try {
    if (*s_score) return cmd_score(common, score);
    if (*s_split) return cmd_split(common, split);
    if (*s_audit) {
      if (*gaps_opt) audit.gaps = gaps;
      return cmd_audit(common, audit);
    }
    if (*s_cons) {
      cons.labeller_a = labellers.at(0);
      cons.labeller_b = labellers.at(1);
      return cmd_consistency(common, cons);
    }
    if (*s_sg) return cmd_splits_gen(common, sg);
    if (*s_w) {
      if (*w_splits) weights.splits = weights_splits;
      return cmd_weights(common, weights);
    }
    if (*s_trend) return cmd_trend(common, trend);
    if (*s_serve) {
      parse_listen(listen, serve_cfg);
      serve_cfg.cohort = cohort_path;
      serve_cfg.image_root = image_root;
      serve_cfg.log = log_path;
      if (*ui_opt) serve_cfg.ui_dir = ui_dir;
      return serve(serve_cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContractError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContractError;
  }
  return kContractError;
}

}  // namespace coco::cli
