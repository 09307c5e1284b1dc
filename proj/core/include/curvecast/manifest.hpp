#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace curvecast::manifest {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit content hash of a file, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // path -> digest
  std::vector<std::pair<std::string, std::string>> outputs;  // path -> digest
  std::string tool_version = kToolVersion;
  double duration_seconds = 0.0;

  /// Writes <primary_output>.manifest.json atomically.
  void write(const std::filesystem::path& primary_output) const;
};

}  // namespace curvecast::manifest
