#include "imclean/manifest.hpp"

#include "imclean/errors.hpp"
#include "imclean/version.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>

namespace imclean::pipeline {

namespace {

std::string to_hex(const unsigned char* digest, unsigned int len) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

struct DigestCtx {
  EVP_MD_CTX* ctx;
  DigestCtx() : ctx(EVP_MD_CTX_new()) {
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
      throw Error("sha256: init failed");
  }
  ~DigestCtx() { EVP_MD_CTX_free(ctx); }
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  DigestCtx d;
  if (EVP_DigestUpdate(d.ctx, bytes.data(), bytes.size()) != 1)
    throw Error("sha256: update failed");
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(d.ctx, digest, &len) != 1) throw Error("sha256: final failed");
  return to_hex(digest, len);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("sha256: cannot open " + path.string());
  DigestCtx d;
  char buffer[1 << 16];
  while (is) {
    is.read(buffer, sizeof(buffer));
    if (is.gcount() > 0 &&
        EVP_DigestUpdate(d.ctx, buffer, static_cast<std::size_t>(is.gcount())) != 1)
      throw Error("sha256: update failed");
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(d.ctx, digest, &len) != 1) throw Error("sha256: final failed");
  return to_hex(digest, len);
}

void RunManifest::add_file(const std::filesystem::path& out_dir,
                           const std::filesystem::path& file) {
  ArtifactEntry e;
  e.path = std::filesystem::relative(file, out_dir).generic_string();
  e.sha256 = sha256_file(file);
  e.bytes = static_cast<std::uint64_t>(std::filesystem::file_size(file));
  artifacts.push_back(std::move(e));
}

void RunManifest::verify(const std::filesystem::path& out_dir) const {
  for (const auto& a : artifacts) {
    const auto path = out_dir / a.path;
    if (!std::filesystem::exists(path))
      throw Error("manifest: missing artifact " + a.path);
    if (sha256_file(path) != a.sha256)
      throw Error("manifest: checksum changed for " + a.path);
  }
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["version"] = version.empty() ? std::string(kVersion) : version;
  auto& arr = j["artifacts"] = nlohmann::json::array();
  std::vector<ArtifactEntry> sorted = artifacts;
  std::sort(sorted.begin(), sorted.end(),
            [](const ArtifactEntry& a, const ArtifactEntry& b) { return a.path < b.path; });
  for (const auto& a : sorted)
    arr.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  return j.dump(2) + "\n";
}

std::string RunManifest::timings_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : timings) j.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& out_dir) const {
  {
    std::ofstream os(out_dir / "manifest.json", std::ios::trunc);
    if (!os) throw IoError("cannot write manifest.json");
    os << to_json();
  }
  std::ofstream os(out_dir / "timings.json", std::ios::trunc);
  if (!os) throw IoError("cannot write timings.json");
  os << timings_json();
}

RunManifest RunManifest::read(const std::filesystem::path& manifest_path) {
  std::ifstream is(manifest_path);
  if (!is) throw IoError("cannot open " + manifest_path.string());
  nlohmann::json j;
  is >> j;
  RunManifest m;
  m.config_hash = j.value("config_hash", "");
  m.version = j.value("version", "");
  for (const auto& a : j.value("artifacts", nlohmann::json::array())) {
    m.artifacts.push_back({a.value("path", ""), a.value("sha256", ""),
                           a.value("bytes", std::uint64_t{0})});
  }
  return m;
}

}  // namespace imclean::pipeline
