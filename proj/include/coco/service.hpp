#pragma once

// Annotation service: serves cohort images to labellers, validates and
// persists point annotations, and returns live contrast scores.
//
// HTTP surface (JSON unless noted):
//   GET  /api/health
//   GET  /api/images?labeller=&filter=annotated|pending|all&page=&page_size=
//   GET  /api/images/{id}          metadata and this labeller's status
//   GET  /api/images/{id}/file     image bytes, content type from the file
//   POST /api/annotations          PointAnnotation body, coordinates only
//   GET  /api/scores?labeller=[&format=csv]

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "coco/cohort.hpp"
#include "coco/errors.hpp"
#include "coco/image.hpp"

namespace httplib {
class Server;
}

namespace coco {

namespace fs = std::filesystem;

// Append-only JSON Lines log with latest-wins reads. Appends are serialized
// and fsynced line by line; readers work on immutable snapshots. A torn
// trailing line left by a crash is cut off on open.
class AnnotationLog {
 public:
  explicit AnnotationLog(fs::path path);
  ~AnnotationLog();
  AnnotationLog(const AnnotationLog&) = delete;
  AnnotationLog& operator=(const AnnotationLog&) = delete;

  void append(const PointAnnotation& a);
  std::shared_ptr<const std::vector<PointAnnotation>> snapshot() const;
  std::size_t size() const { return snapshot()->size(); }
  const fs::path& path() const { return path_; }
  std::size_t truncated_bytes() const { return truncated_bytes_; }

 private:
  fs::path path_;
  int fd_ = -1;
  std::size_t truncated_bytes_ = 0;
  std::mutex write_mutex_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const std::vector<PointAnnotation>> snapshot_;
};

class HttpError : public Error {
 public:
  HttpError(int status, const std::string& message) : Error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

enum class ImageFilter { annotated, pending, all };
ImageFilter parse_image_filter(std::string_view s);

struct ServiceOptions {
  int patch_size = 1;
  double l_min = kDefaultLuminanceFloor;
  std::size_t default_page_size = 50;
  std::size_t max_page_size = 500;
};

struct SubmitResult {
  PointAnnotation annotation;  // as stored, with server-read colors
  ContrastScore score;
};

class AnnotationService {
 public:
  AnnotationService(std::vector<ImageRecord> cohort, fs::path image_root,
                    AnnotationLog& log, ServiceOptions options = {});

  nlohmann::json health() const;
  nlohmann::json list_images(const std::string& labeller, ImageFilter filter,
                             std::size_t page = 1, std::size_t page_size = 0) const;
  nlohmann::json image_metadata(const std::string& image_id,
                                const std::string& labeller) const;
  // Raw file bytes and MIME type. Throws HttpError 404.
  std::pair<std::string, std::string> image_file(const std::string& image_id) const;

  // Re-reads pick colors from the stored image, validates, appends, scores.
  // Throws HttpError 404 (unknown image) or 422 (protocol violation).
  SubmitResult submit(PointAnnotation annotation);
  SubmitResult submit_json(const std::string& body);

  // Latest score per image annotated by `labeller`; same rows as the CLI
  // score command on the same log.
  std::vector<ImageRecord> scores(const std::string& labeller) const;
  nlohmann::json scores_json(const std::string& labeller) const;
  std::string scores_csv(const std::string& labeller) const;

  void mount(httplib::Server& server);

  const AnnotationLog& log() const { return log_; }

 private:
  const ImageRecord& record(const std::string& image_id) const;
  std::shared_ptr<const Image> image(const ImageRecord& rec) const;

  std::vector<ImageRecord> cohort_;  // sorted by image_id
  std::map<std::string, std::size_t> index_;
  fs::path image_root_;
  AnnotationLog& log_;
  ServiceOptions options_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<const Image>> cache_;
};

struct ServeConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  fs::path cohort;
  fs::path image_root;
  fs::path log;
  std::optional<fs::path> ui_dir;
  ServiceOptions options;
};

// Blocks until the server stops. Returns a process exit code.
int serve(const ServeConfig& config);

}  // namespace coco
