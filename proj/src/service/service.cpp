#include "coco/service.hpp"

#include <algorithm>
#include <csignal>
#include <iostream>

#include <httplib.h>

#include "coco/io.hpp"

namespace coco {

using nlohmann::json;

ImageFilter parse_image_filter(std::string_view s) {
  if (s.empty() || s == "all") return ImageFilter::all;
  if (s == "pending") return ImageFilter::pending;
  if (s == "annotated") return ImageFilter::annotated;
  throw HttpError(400, "filter must be annotated, pending or all");
}

AnnotationService::AnnotationService(std::vector<ImageRecord> cohort, fs::path image_root,
                                     AnnotationLog& log, ServiceOptions options)
    : cohort_(std::move(cohort)),
      image_root_(std::move(image_root)),
      log_(log),
      options_(options) {
  std::sort(cohort_.begin(), cohort_.end(),
            [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  for (std::size_t i = 0; i < cohort_.size(); ++i) index_[cohort_[i].image_id] = i;
  if (options_.patch_size < 1 || options_.patch_size % 2 == 0) {
    throw InputDomainError("patch size must be a positive odd number");
  }
}

const ImageRecord& AnnotationService::record(const std::string& image_id) const {
  auto it = index_.find(image_id);
  if (it == index_.end()) throw HttpError(404, "unknown image '" + image_id + "'");
  return cohort_[it->second];
}

std::shared_ptr<const Image> AnnotationService::image(const ImageRecord& rec) const {
  {
    std::lock_guard lock(cache_mutex_);
    auto it = cache_.find(rec.image_id);
    if (it != cache_.end()) return it->second;
  }
  auto img = std::make_shared<const Image>(load_image(image_root_ / rec.file_path));
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(rec.image_id, std::move(img)).first->second;
}

json AnnotationService::health() const {
  return {{"status", "ok"},
          {"images", cohort_.size()},
          {"annotations", log_.size()},
          {"log", log_.path().string()}};
}

json AnnotationService::list_images(const std::string& labeller, ImageFilter filter,
                                    std::size_t page, std::size_t page_size) const {
  if (page_size == 0) page_size = options_.default_page_size;
  page_size = std::min(page_size, options_.max_page_size);
  if (page == 0) throw HttpError(400, "page numbers start at 1");
  const auto snap = log_.snapshot();
  const auto done = latest_for_labeller(*snap, labeller);

  std::vector<const ImageRecord*> matches;
  // No labeller means no queue: an empty pending list instead of an error.
  const bool no_queue = labeller.empty() && filter == ImageFilter::pending;
  for (const auto& r : cohort_) {
    if (no_queue) break;
    const bool annotated = done.count(r.image_id) > 0;
    if (filter == ImageFilter::all || (filter == ImageFilter::annotated) == annotated) {
      matches.push_back(&r);
    }
  }
  json images = json::array();
  const std::size_t begin = (page - 1) * page_size;
  for (std::size_t i = begin; i < matches.size() && i < begin + page_size; ++i) {
    const auto& r = *matches[i];
    images.push_back({{"image_id", r.image_id},
                      {"fst_group", to_string(r.fst_group)},
                      {"malignant", r.malignant},
                      {"annotated", done.count(r.image_id) > 0}});
  }
  return {{"labeller", labeller},
          {"filter", filter == ImageFilter::all       ? "all"
                     : filter == ImageFilter::pending ? "pending"
                                                      : "annotated"},
          {"page", page},
          {"page_size", page_size},
          {"total", matches.size()},
          {"images", images}};
}

json AnnotationService::image_metadata(const std::string& image_id,
                                       const std::string& labeller) const {
  const auto& rec = record(image_id);
  const auto img = image(rec);
  const auto snap = log_.snapshot();
  const auto done = latest_for_labeller(*snap, labeller);
  json j = {{"image_id", rec.image_id},
            {"file_path", rec.file_path},
            {"fst_group", to_string(rec.fst_group)},
            {"malignant", rec.malignant},
            {"width", img->width()},
            {"height", img->height()},
            {"annotated", done.count(image_id) > 0}};
  if (auto it = done.find(image_id); it != done.end()) {
    j["annotation"] = io::annotation_to_json(it->second);
  }
  return j;
}

std::pair<std::string, std::string> AnnotationService::image_file(
    const std::string& image_id) const {
  const auto& rec = record(image_id);
  std::string bytes;
  try {
    bytes = io::read_file(image_root_ / rec.file_path);
  } catch (const ContractError&) {
    throw HttpError(404, "image file missing for '" + image_id + "'");
  }
  const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const auto format = sniff_format({data, bytes.size()});
  return {std::move(bytes), mime_type(format)};
}

SubmitResult AnnotationService::submit(PointAnnotation a) {
  const auto& rec = record(a.image_id);
  const auto img = image(rec);
  a.patch_size = options_.patch_size;
  try {
    validate_annotation(a, img->width(), img->height());
  } catch (const ProtocolViolation& e) {
    throw HttpError(422, e.what());
  }
  for (auto* region : {&a.foreground, &a.background}) {
    for (auto& p : *region) p.color = sample_pixel(*img, p.x, p.y, a.patch_size);
  }
  a.created_at = io::utc_timestamp();
  const ContrastScore score = contrast_ratio(average_foreground(a), average_background(a));
  log_.append(a);
  return {std::move(a), score};
}

SubmitResult AnnotationService::submit_json(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw HttpError(400, std::string("invalid JSON: ") + e.what());
  }
  PointAnnotation a;
  try {
    a = io::annotation_from_json(j);
  } catch (const ContractError& e) {
    throw HttpError(422, e.what());
  }
  return submit(std::move(a));
}

std::vector<ImageRecord> AnnotationService::scores(const std::string& labeller) const {
  const auto snap = log_.snapshot();
  const auto done = latest_for_labeller(*snap, labeller);
  std::vector<ImageRecord> annotated;
  for (const auto& r : cohort_) {
    if (done.count(r.image_id)) annotated.push_back(r);
  }
  auto result = score_cohort(annotated, *snap, labeller);
  std::vector<ImageRecord> out;
  for (auto& r : result.records) {
    if (r.contrast_score) out.push_back(std::move(r));
  }
  return out;
}

json AnnotationService::scores_json(const std::string& labeller) const {
  json rows = json::array();
  for (const auto& r : scores(labeller)) {
    const auto& s = *r.contrast_score;
    rows.push_back({{"image_id", r.image_id},
                    {"contrast_score", s.value},
                    {"l_lighter", s.lighter},
                    {"l_darker", s.darker},
                    {"excluded", is_abnormal_score(s, options_.l_min)}});
  }
  return {{"labeller", labeller}, {"l_min", options_.l_min}, {"scores", rows}};
}

std::string AnnotationService::scores_csv(const std::string& labeller) const {
  return io::scores_csv(scores(labeller), options_.l_min);
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const HttpError& e) {
    send_json(res, e.status(), {{"error", e.what()}});
  } catch (const Error& e) {
    send_json(res, 500, {{"error", e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"error", e.what()}});
  }
}

std::size_t param_size(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return static_cast<std::size_t>(
        io::parse_uint(req.get_param_value(key), std::string(key) + ": "));
  } catch (const ContractError& e) {
    throw HttpError(400, e.what());
  }
}

}  // namespace

void AnnotationService::mount(httplib::Server& server) {
  server.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, health()); });
  });
  server.Get("/api/images", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto filter = parse_image_filter(req.get_param_value("filter"));
      send_json(res, 200,
                list_images(req.get_param_value("labeller"), filter,
                            param_size(req, "page", 1), param_size(req, "page_size", 0)));
    });
  });
  server.Get(R"(/api/images/([^/]+)/file)",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 auto [bytes, mime] = image_file(req.matches[1]);
                 res.status = 200;
                 res.set_content(std::move(bytes), mime);
               });
             });
  server.Get(R"(/api/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, 200, image_metadata(req.matches[1], req.get_param_value("labeller")));
    });
  });
  server.Post("/api/annotations", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto r = submit_json(req.body);
      send_json(res, 200,
                {{"annotation", io::annotation_to_json(r.annotation)},
                 {"contrast_score", r.score.value},
                 {"l_lighter", r.score.lighter},
                 {"l_darker", r.score.darker},
                 {"abnormal", is_abnormal_score(r.score, options_.l_min)}});
    });
  });
  server.Get("/api/scores", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto labeller = req.get_param_value("labeller");
      if (req.get_param_value("format") == "csv") {
        res.status = 200;
        res.set_content(scores_csv(labeller), "text/csv");
      } else {
        send_json(res, 200, scores_json(labeller));
      }
    });
  });
}

namespace {
httplib::Server* g_server = nullptr;
void handle_stop(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int serve(const ServeConfig& config) {
  AnnotationLog log(config.log);
  if (log.truncated_bytes() > 0) {
    std::cerr << "annotation log: dropped " << log.truncated_bytes()
              << " bytes of a torn trailing line\n";
  }
  AnnotationService service(io::read_cohort(config.cohort), config.image_root, log,
                            config.options);
  httplib::Server server;
  service.mount(server);
  if (config.ui_dir && !server.set_mount_point("/", config.ui_dir->string())) {
    std::cerr << "ui directory not found: " << config.ui_dir->string() << "\n";
    return 2;
  }
  g_server = &server;
  std::signal(SIGINT, handle_stop);
  std::signal(SIGTERM, handle_stop);
  std::cerr << "listening on " << config.host << ":" << config.port << " ("
            << log.size() << " annotations loaded)\n";
  const bool ok = server.listen(config.host, config.port);
  g_server = nullptr;
  return ok ? 0 : 2;
}

}  // namespace coco
