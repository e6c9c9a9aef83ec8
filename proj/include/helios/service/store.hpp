#pragma once

// File-backed document store. Documents are JSON files under <root>/<bucket>/<key>.json, written
// through a temporary file and a rename so a crash never leaves a torn document.

#include <openssl/evp.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "helios/core/json.hpp"
#include "helios/io/instance_io.hpp"

namespace helios::service {

namespace fs = std::filesystem;

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::validation, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// Canonical text: object keys sorted (nlohmann keeps std::map order), no whitespace.
inline std::string content_hash(const json& j) { return sha256_hex(j.dump()); }

class FileStore {
 public:
  explicit FileStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  const fs::path& root() const { return root_; }

  void put(const std::string& bucket, const std::string& key, const json& doc) {
    check_key(key);
    fs::path dir = root_ / bucket;
    fs::create_directories(dir);
    fs::path tmp = dir / (key + ".tmp" + std::to_string(counter_++));
    io::write_text(tmp, doc.dump());
    fs::rename(tmp, dir / (key + ".json"));
  }

  std::optional<json> get(const std::string& bucket, const std::string& key) const {
    if (!valid_key(key)) return std::nullopt;
    fs::path p = root_ / bucket / (key + ".json");
    std::error_code ec;
    if (!fs::exists(p, ec)) return std::nullopt;
    return io::parse_json(io::read_text(p), p.string());
  }

  bool contains(const std::string& bucket, const std::string& key) const {
    std::error_code ec;
    return valid_key(key) && fs::exists(root_ / bucket / (key + ".json"), ec);
  }

  std::vector<std::string> keys(const std::string& bucket) const {
    std::vector<std::string> out;
    std::error_code ec;
    if (!fs::is_directory(root_ / bucket, ec)) return out;
    for (const auto& e : fs::directory_iterator(root_ / bucket))
      if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
  }

  static bool valid_key(const std::string& key) {
    if (key.empty() || key.size() > 128) return false;
    for (char c : key)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
    return true;
  }

 private:
  static void check_key(const std::string& key) {
    if (!valid_key(key)) fail(ErrorCode::validation, "invalid store key '" + key + "'");
  }

  fs::path root_;
  std::atomic<uint64_t> counter_{0};
};

}  // namespace helios::service
