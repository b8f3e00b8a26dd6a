#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <fcntl.h>
#include <unistd.h>

#include "coco/errors.hpp"
#include "coco/io.hpp"

namespace coco::io {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw ContractError("cannot write " + tmp.string());
  std::size_t off = 0;
  while (off < content.size()) {
    const ssize_t n = ::write(fd, content.data() + off, content.size() - off);
    if (n < 0) {
      ::close(fd);
      fs::remove(tmp);
      throw ContractError("write failed for " + tmp.string());
    }
    off += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  fs::rename(tmp, path);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

bool parse_flag(std::string_view s, const std::string& where, const char* what) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw ContractError(where + what + " must be 0 or 1, got '" + std::string(s) + "'");
}

void require_unique(std::set<std::string>& seen, const std::string& id,
                    const std::string& where) {
  if (id.empty()) throw ContractError(where + "empty image_id");
  if (!seen.insert(id).second) {
    throw ContractError(where + "duplicate image_id '" + id + "'");
  }
}

}  // namespace

std::vector<ImageRecord> parse_cohort(const CsvTable& t) {
  const auto c_id = t.column("image_id");
  const auto c_path = t.column("file_path");
  const auto c_fst = t.column("fst_group");
  const auto c_mal = t.column("malignant");
  std::vector<ImageRecord> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = t.where(i);
    ImageRecord r;
    r.image_id = row[c_id];
    require_unique(seen, r.image_id, where);
    r.file_path = row[c_path];
    try {
      r.fst_group = parse_fst_group(row[c_fst]);
    } catch (const ContractError& e) {
      throw ContractError(where + e.what());
    }
    r.malignant = parse_flag(row[c_mal], where, "malignant");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ImageRecord> read_cohort(const fs::path& path) {
  return parse_cohort(read_csv(path));
}

std::string scores_csv(std::span<const ImageRecord> records, double l_min) {
  std::string out = "image_id,contrast_score,l_lighter,l_darker,excluded\n";
  for (const auto& r : records) {
    if (!r.contrast_score) continue;
    const auto& s = *r.contrast_score;
    out += csv_field(r.image_id) + "," + format_double(s.value) + "," +
           format_double(s.lighter) + "," + format_double(s.darker) + "," +
           (is_abnormal_score(s, l_min) ? "1" : "0") + "\n";
  }
  return out;
}

std::string exclusions_csv(std::span<const ImageRecord> records, double l_min) {
  std::string out = "image_id,contrast_score,l_lighter,l_darker,l_min\n";
  for (const auto& r : records) {
    if (!r.contrast_score || !is_abnormal_score(*r.contrast_score, l_min)) continue;
    const auto& s = *r.contrast_score;
    out += csv_field(r.image_id) + "," + format_double(s.value) + "," +
           format_double(s.lighter) + "," + format_double(s.darker) + "," +
           format_double(l_min) + "\n";
  }
  return out;
}

std::vector<ImageRecord> parse_scores(const CsvTable& t) {
  const auto c_id = t.column("image_id");
  const auto c_score = t.column("contrast_score");
  const auto c_hi = t.column("l_lighter");
  const auto c_lo = t.column("l_darker");
  const auto c_ex = t.column("excluded");
  std::vector<ImageRecord> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = t.where(i);
    ImageRecord r;
    r.image_id = row[c_id];
    require_unique(seen, r.image_id, where);
    ContrastScore s;
    s.value = parse_double(row[c_score], where);
    s.lighter = parse_double(row[c_hi], where);
    s.darker = parse_double(row[c_lo], where);
    if (!(s.value >= 1.0 && s.value <= 21.0)) {
      throw ContractError(where + "contrast_score outside [1, 21]");
    }
    r.contrast_score = s;
    if (parse_flag(row[c_ex], where, "excluded")) r.contrast_group = ContrastGroup::excluded;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ImageRecord> read_scores(const fs::path& path) {
  return parse_scores(read_csv(path));
}

std::string groups_csv(const GroupingResult& g) {
  std::string out = "image_id,contrast_score,contrast_group,cutoff\n";
  const std::string cutoff = format_double(g.cutoff);
  for (const auto& r : g.records) {
    if (!r.contrast_group) continue;
    out += csv_field(r.image_id) + "," +
           (r.contrast_score ? format_double(r.contrast_score->value) : "NA") + "," +
           std::string(to_string(*r.contrast_group)) + "," + cutoff + "\n";
  }
  return out;
}

nlohmann::json groups_summary(const GroupingResult& g) {
  return {{"median", g.cutoff},
          {"n_high", g.n_high},
          {"n_low", g.n_low},
          {"n_excluded", g.excluded.size()},
          {"excluded", g.excluded}};
}

std::map<std::string, GroupRow> parse_groups(const CsvTable& t) {
  const auto c_id = t.column("image_id");
  const auto c_score = t.column("contrast_score");
  const auto c_group = t.column("contrast_group");
  std::map<std::string, GroupRow> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = t.where(i);
    GroupRow g;
    try {
      g.group = parse_contrast_group(row[c_group]);
    } catch (const ContractError& e) {
      throw ContractError(where + e.what());
    }
    g.contrast_score = row[c_score] == "NA" ? 0.0 : parse_double(row[c_score], where);
    if (row[c_id].empty()) throw ContractError(where + "empty image_id");
    if (!out.emplace(row[c_id], g).second) {
      throw ContractError(where + "duplicate image_id '" + row[c_id] + "'");
    }
  }
  return out;
}

std::map<std::string, GroupRow> read_groups(const fs::path& path) {
  return parse_groups(read_csv(path));
}

std::vector<ImageRecord> join_groups(std::vector<ImageRecord> cohort,
                                     const std::map<std::string, GroupRow>& groups) {
  std::set<std::string> known;
  for (auto& r : cohort) {
    known.insert(r.image_id);
    auto it = groups.find(r.image_id);
    if (it == groups.end()) continue;
    r.contrast_group = it->second.group;
    ContrastScore s;
    s.value = it->second.contrast_score;
    r.contrast_score = s;
  }
  for (const auto& [id, g] : groups) {
    if (!known.count(id)) {
      throw ContractError("groups file names image '" + id + "' absent from the cohort");
    }
  }
  return cohort;
}

std::string splits_csv(std::span<const SplitAssignment> splits) {
  std::string out = "image_id,seed,phase\n";
  for (const auto& s : splits) {
    out += csv_field(s.image_id) + "," + std::to_string(s.seed) + "," +
           std::string(to_string(s.phase)) + "\n";
  }
  return out;
}

std::vector<SplitAssignment> parse_splits(const CsvTable& t) {
  const auto c_id = t.column("image_id");
  const auto c_seed = t.column("seed");
  const auto c_phase = t.column("phase");
  std::vector<SplitAssignment> out;
  std::set<std::pair<std::string, std::uint64_t>> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = t.where(i);
    SplitAssignment s;
    s.image_id = row[c_id];
    s.seed = parse_uint(row[c_seed], where);
    try {
      s.phase = parse_split_phase(row[c_phase]);
    } catch (const ContractError& e) {
      throw ContractError(where + e.what());
    }
    if (!seen.emplace(s.image_id, s.seed).second) {
      throw ContractError(where + "image '" + s.image_id + "' assigned twice for seed " +
                          std::to_string(s.seed));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SplitAssignment> read_splits(const fs::path& path) {
  return parse_splits(read_csv(path));
}

std::vector<PredictionRecord> parse_predictions(const CsvTable& t) {
  const auto c_id = t.column("image_id");
  const auto c_model = t.column("model_id");
  const auto c_seed = t.column("seed");
  const auto c_phase = t.column("phase");
  const auto c_prob = t.column("malignant_prob");
  std::vector<PredictionRecord> out;
  std::set<std::tuple<std::string, std::string, std::uint64_t, int>> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = t.where(i);
    PredictionRecord p;
    p.image_id = row[c_id];
    p.model_id = row[c_model];
    p.seed = parse_uint(row[c_seed], where);
    try {
      p.phase = parse_eval_phase(row[c_phase]);
    } catch (const ContractError& e) {
      throw ContractError(where + e.what());
    }
    p.malignant_prob = parse_double(row[c_prob], where);
    if (!(p.malignant_prob >= 0.0 && p.malignant_prob <= 1.0)) {
      throw ContractError(where + "malignant_prob outside [0, 1]");
    }
    if (!seen.emplace(p.image_id, p.model_id, p.seed, static_cast<int>(p.phase)).second) {
      throw ContractError(where + "duplicate prediction key for image '" + p.image_id + "'");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PredictionRecord> read_predictions(const fs::path& path) {
  return parse_predictions(read_csv(path));
}

std::string predictions_csv(std::span<const PredictionRecord> predictions) {
  std::string out = "image_id,model_id,seed,phase,malignant_prob\n";
  for (const auto& p : predictions) {
    out += csv_field(p.image_id) + "," + csv_field(p.model_id) + "," +
           std::to_string(p.seed) + "," + std::string(to_string(p.phase)) + "," +
           format_double(p.malignant_prob) + "\n";
  }
  return out;
}

}  // namespace coco::io
