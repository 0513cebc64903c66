#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace imclean::pipeline {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ArtifactEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

/// Deterministic record of a run: config hash + artifact checksums +
/// versions. Wall-clock timings are serialized separately (timings.json)
/// so reruns of the same config produce byte-identical manifests.
struct RunManifest {
  std::string config_hash;
  std::vector<ArtifactEntry> artifacts;
  std::vector<StageTiming> timings;
  std::string version;

  void add_file(const std::filesystem::path& out_dir, const std::filesystem::path& file);

  /// Re-hashes every listed artifact; throws if any file is missing or
  /// its checksum changed.
  void verify(const std::filesystem::path& out_dir) const;

  std::string to_json() const;          // deterministic part only
  std::string timings_json() const;

  void write(const std::filesystem::path& out_dir) const;
  static RunManifest read(const std::filesystem::path& manifest_path);
};

}  // namespace imclean::pipeline
