#pragma once

// Executes a RunConfig and writes its artifacts plus a manifest
// `<stem>.manifest.json` listing every file with its SHA-256.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rotor/config.hpp"
#include "rotor/execution.hpp"

namespace rotor {

struct RunReport {
  std::string config_hash;
  std::vector<std::filesystem::path> files;
  std::map<std::string, double> values;  // also written to <stem>_summary.json
};

RunReport execute_config(const RunConfig& config, Execution exec = Execution::parallel);

struct VerifyReport {
  int manifests = 0;
  int files = 0;
  std::vector<std::string> problems;
  bool ok() const noexcept { return manifests > 0 && problems.empty(); }
};

/// Re-hashes every file named by the manifests in `directory` and checks the
/// config hash embedded in each one.  With `config`, the manifest of the same
/// stem must also carry that config's hash.
VerifyReport verify_outputs(const std::filesystem::path& directory, const RunConfig* config = nullptr);

}  // namespace rotor
