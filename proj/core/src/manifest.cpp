#include "curvecast/manifest.hpp"

#include <cstdio>

#include <json.hpp>

#include "curvecast/io.hpp"
#include "curvecast/rng.hpp"

namespace curvecast::manifest {

std::string file_digest(const std::filesystem::path& path) {
  std::string content = io::read_file(path);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(rng::fnv1a64(content)));
  return buf;
}

void RunManifest::write(const std::filesystem::path& primary_output) const {
  nlohmann::json j;
  j["command"] = command;
  j["argv"] = argv;
  j["seed"] = seed;
  j["tool_version"] = tool_version;
  j["duration_seconds"] = duration_seconds;
  nlohmann::json in = nlohmann::json::object();
  for (const auto& [p, d] : inputs) in[p] = d;
  j["inputs"] = in;
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [p, d] : outputs) out[p] = d;
  j["outputs"] = out;
  auto path = primary_output;
  path += ".manifest.json";
  io::write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace curvecast::manifest
