#include <fcntl.h>
#include <unistd.h>

#include "coco/io.hpp"
#include "coco/service.hpp"

namespace coco {

AnnotationLog::AnnotationLog(fs::path path) : path_(std::move(path)) {
  std::vector<PointAnnotation> entries;
  if (fs::exists(path_)) {
    std::string text = io::read_file(path_);
    const std::size_t last_nl = text.rfind('\n');
    const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
    if (keep < text.size()) {
      truncated_bytes_ = text.size() - keep;
      text.resize(keep);
      fs::resize_file(path_, keep);
    }
    entries = io::parse_annotation_log(text, path_.string());
  } else if (path_.has_parent_path()) {
    fs::create_directories(path_.parent_path());
  }
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd_ < 0) throw ContractError("cannot open annotation log " + path_.string());
  snapshot_ = std::make_shared<const std::vector<PointAnnotation>>(std::move(entries));
}

AnnotationLog::~AnnotationLog() {
  if (fd_ >= 0) ::close(fd_);
}

void AnnotationLog::append(const PointAnnotation& a) {
  const std::string line = io::annotation_to_line(a);
  std::lock_guard lock(write_mutex_);
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + off, line.size() - off);
    if (n < 0) throw ContractError("annotation log write failed: " + path_.string());
    off += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw ContractError("annotation log fsync failed");

  auto next = std::make_shared<std::vector<PointAnnotation>>(*snapshot());
  next->push_back(a);
  std::lock_guard snap(snapshot_mutex_);
  snapshot_ = std::move(next);
}

std::shared_ptr<const std::vector<PointAnnotation>> AnnotationLog::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

}  // namespace coco
