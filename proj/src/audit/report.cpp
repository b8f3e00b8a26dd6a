#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "coco/audit.hpp"
#include "coco/io.hpp"

namespace coco {

namespace {

using BlockKey = std::pair<std::string, EvalPhase>;

std::vector<BlockKey> block_order(const AuditReport& r) {
  std::vector<BlockKey> keys;
  auto add = [&](const BlockKey& k) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  };
  for (const auto& c : r.cells) add({c.model_id, c.phase});
  for (const auto& g : r.gaps) add({g.model_id, g.phase});
  return keys;
}

std::string opt(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string("NA");
}

std::string fixed3(double v, bool sign) {
  char buf[32];
  std::snprintf(buf, sizeof buf, sign ? "%+.3f" : "%.3f", v);
  return buf;
}

}  // namespace

std::string format_audit_csv(const AuditReport& report) {
  std::string out = "model_id,phase,axis,subgroup,mean_auc,std_auc,n_images,n_seeds";
  if (report.with_ci) out += ",ci_lo,ci_hi";
  out += "\n";
  const std::string axis(to_string(report.axis));
  for (const auto& key : block_order(report)) {
    for (const auto& c : report.cells) {
      if (c.model_id != key.first || c.phase != key.second) continue;
      out += io::csv_field(c.model_id) + "," + std::string(to_string(c.phase)) + "," + axis +
             "," + io::csv_field(c.subgroup) + "," + opt(c.mean_auc) + "," + opt(c.std_auc) +
             "," + std::to_string(c.n_images) + "," + std::to_string(c.seed_auc.size());
      if (report.with_ci) {
        out += c.ci ? "," + io::format_double(c.ci->first) + "," +
                          io::format_double(c.ci->second)
                    : std::string(",NA,NA");
      }
      out += "\n";
    }
    for (const auto& g : report.gaps) {
      if (g.model_id != key.first || g.phase != key.second) continue;
      out += io::csv_field(g.model_id) + "," + std::string(to_string(g.phase)) + "," + axis +
             "," + io::csv_field(g.pair.label()) + "," + opt(g.gap) + "," + opt(g.std_gap) +
             ",NA," + std::to_string(g.n_seeds);
      if (report.with_ci) out += ",NA,NA";
      out += "\n";
    }
  }
  return out;
}

std::string format_audit_table(const AuditReport& report) {
  std::ostringstream os;
  const auto keys = block_order(report);
  std::vector<EvalPhase> phases;
  std::vector<std::string> models;
  for (const auto& [m, p] : keys) {
    if (std::find(phases.begin(), phases.end(), p) == phases.end()) phases.push_back(p);
    if (std::find(models.begin(), models.end(), m) == models.end()) models.push_back(m);
  }
  std::sort(phases.begin(), phases.end());

  for (const auto phase : phases) {
    std::vector<std::string> rows;
    std::map<std::pair<std::string, std::string>, std::string> text;  // (row, model)
    for (const auto& c : report.cells) {
      if (c.phase != phase) continue;
      if (std::find(rows.begin(), rows.end(), c.subgroup) == rows.end()) rows.push_back(c.subgroup);
      std::string s = "undefined";
      if (c.mean_auc) {
        s = fixed3(*c.mean_auc, false);
        if (c.seed_auc.size() > 1) s += " +/- " + fixed3(*c.std_auc, false);
      }
      text[{c.subgroup, c.model_id}] = s;
    }
    // Keep axis order for subgroup rows.
    std::vector<std::string> ordered;
    for (const auto& name : axis_subgroups(report.axis)) {
      if (std::find(rows.begin(), rows.end(), name) != rows.end()) ordered.push_back(name);
    }
    for (const auto& g : report.gaps) {
      if (g.phase != phase) continue;
      const std::string label = g.pair.label();
      if (std::find(ordered.begin(), ordered.end(), label) == ordered.end()) ordered.push_back(label);
      text[{label, g.model_id}] = g.gap ? fixed3(*g.gap, true) : std::string("undefined");
    }

    std::size_t first_width = 4;
    for (const auto& r : ordered) first_width = std::max(first_width, r.size());
    std::vector<std::size_t> widths;
    for (const auto& m : models) {
      std::size_t w = m.size();
      for (const auto& r : ordered) {
        auto it = text.find({r, m});
        if (it != text.end()) w = std::max(w, it->second.size());
      }
      widths.push_back(w);
    }

    os << "Average AUC by " << to_string(report.axis) << " (" << to_string(phase) << ")\n";
    auto pad = [](const std::string& s, std::size_t w) {
      return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    os << pad("AUC", first_width);
    for (std::size_t i = 0; i < models.size(); ++i) os << "  " << pad(models[i], widths[i]);
    os << "\n";
    for (const auto& r : ordered) {
      os << pad(r, first_width);
      for (std::size_t i = 0; i < models.size(); ++i) {
        auto it = text.find({r, models[i]});
        os << "  " << pad(it == text.end() ? "-" : it->second, widths[i]);
      }
      os << "\n";
    }
    os << "\n";
  }
  for (const auto& c : report.cells) {
    for (const auto& u : c.undefined) {
      os << "note: " << c.model_id << " " << to_string(c.phase) << " " << c.subgroup << " "
         << u << "\n";
    }
  }
  if (report.unjoined_predictions > 0) {
    os << "note: " << report.unjoined_predictions
       << " prediction(s) reference images absent from the cohort\n";
  }
  return os.str();
}

}  // namespace coco
