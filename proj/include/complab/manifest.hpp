#pragma once

#include <string>
#include <vector>

namespace complab::manifest {

inline constexpr const char* kToolVersion = "0.1.0";

// Machine-readable record of a CLI run, sufficient to replay it.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> args;
  std::string resolved_config_json;  // serialized config object
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  uint64_t seed = 0;
  double duration_ms = 0.0;
};

std::string to_json(const RunManifest& m);

}  // namespace complab::manifest
