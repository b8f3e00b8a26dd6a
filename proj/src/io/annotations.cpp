#include "coco/errors.hpp"
#include "coco/io.hpp"

namespace coco::io {

using nlohmann::json;

namespace {

json picks_to_json(const std::vector<Pick>& picks) {
  json arr = json::array();
  for (const auto& p : picks) {
    arr.push_back({{"x", p.x},
                   {"y", p.y},
                   {"r", p.color.r},
                   {"g", p.color.g},
                   {"b", p.color.b}});
  }
  return arr;
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ContractError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ContractError(std::string("field '") + key + "' has the wrong type");
  }
}

std::vector<Pick> picks_from_json(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ContractError(std::string("field '") + key + "' must be an array of points");
  }
  std::vector<Pick> out;
  for (const auto& e : j.at(key)) {
    if (!e.is_object()) throw ContractError(std::string(key) + " entries must be objects");
    Pick p;
    p.x = required<int>(e, "x");
    p.y = required<int>(e, "y");
    // Colors are absent in submissions; the server fills them in.
    if (e.contains("r") || e.contains("g") || e.contains("b")) {
      try {
        p.color = make_srgb(required<int>(e, "r"), required<int>(e, "g"),
                            required<int>(e, "b"));
      } catch (const InputDomainError& err) {
        throw ContractError(std::string(key) + ": " + err.what());
      }
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

json annotation_to_json(const PointAnnotation& a) {
  return {{"schema_version", a.schema_version},
          {"image_id", a.image_id},
          {"labeller_id", a.labeller_id},
          {"foreground", picks_to_json(a.foreground)},
          {"background", picks_to_json(a.background)},
          {"lighting_flag", a.lighting_flag},
          {"checklist", a.checklist},
          {"patch_size", a.patch_size},
          {"created_at", a.created_at}};
}

PointAnnotation annotation_from_json(const json& j) {
  if (!j.is_object()) throw ContractError("annotation must be a JSON object");
  PointAnnotation a;
  a.schema_version = j.value("schema_version", kAnnotationSchemaVersion);
  a.image_id = required<std::string>(j, "image_id");
  a.labeller_id = required<std::string>(j, "labeller_id");
  a.foreground = picks_from_json(j, "foreground");
  a.background = picks_from_json(j, "background");
  a.lighting_flag = required<bool>(j, "lighting_flag");
  if (j.contains("checklist")) a.checklist = j.at("checklist");
  if (j.contains("patch_size")) a.patch_size = required<int>(j, "patch_size");
  if (j.contains("created_at")) a.created_at = required<std::string>(j, "created_at");
  return a;
}

std::string annotation_to_line(const PointAnnotation& a) {
  return annotation_to_json(a).dump() + "\n";
}

std::vector<PointAnnotation> parse_annotation_log(std::string_view text,
                                                  const std::string& source) {
  std::vector<PointAnnotation> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      out.push_back(annotation_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw ContractError(source + ":" + std::to_string(line_no) + ": invalid JSON: " +
                          e.what());
    } catch (const ContractError& e) {
      throw ContractError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PointAnnotation> read_annotation_log(const fs::path& path) {
  return parse_annotation_log(read_file(path), path.string());
}

}  // namespace coco::io
