#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "coco/cli.hpp"
#include "coco/errors.hpp"
#include "coco/io.hpp"

namespace coco::cli {

#ifndef COCO_VERSION
#define COCO_VERSION "dev"
#endif

std::string tool_version() { return COCO_VERSION; }

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& p : m.inputs) {
    inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  }
  return {{"command", m.command},
          {"tool_version", tool_version()},
          {"timestamp", io::utc_timestamp()},
          {"inputs", inputs},
          {"config", m.config}};
}

void write_output(const fs::path& out_dir, const std::string& name,
                  const std::string& content, const RunManifest& m) {
  io::write_file_atomic(out_dir / name, content);
  io::write_file_atomic(out_dir / (name + ".manifest.json"), manifest_json(m).dump(2) + "\n");
}

}  // namespace coco::cli
