#include "complab/manifest.hpp"

#include <json.hpp>

namespace complab::manifest {

std::string to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["subcommand"] = m.subcommand;
  j["args"] = m.args;
  if (!m.resolved_config_json.empty())
    j["config"] = nlohmann::ordered_json::parse(m.resolved_config_json);
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["seed"] = m.seed;
  j["duration_ms"] = m.duration_ms;
  return j.dump(2) + "\n";
}

}  // namespace complab::manifest
