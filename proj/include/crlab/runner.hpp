#pragma once

// Config-driven front end: parses a JSON run configuration, executes one of
// the tasks (chain | geodesic | curvature-report | embed-verify | suite) and
// writes CSV/JSON artifacts stamped with the tool version, the config digest
// and the effective seed.
//
// Exit codes: 0 success, 2 config/validation error, 3 numerical failure.
// Failures carry a machine-readable record
//   {"error": {"code": ..., "field": ..., "message": ...}}.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace crlab {

struct RunOutcome {
  int exit_code = 0;
  std::string error_json;              // empty on success
  std::vector<std::string> artifacts;  // files written
};

std::uint64_t fnv1a64(std::string_view s);

RunOutcome run_config(const nlohmann::ordered_json& cfg, const std::string& out_dir,
                      std::uint64_t digest, std::optional<long> seed_override);

// Digest is taken over the raw file bytes.
RunOutcome run_config_file(const std::string& path, const std::string& out_dir,
                           std::optional<long> seed_override);

}  // namespace crlab
