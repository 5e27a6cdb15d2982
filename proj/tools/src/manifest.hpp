#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tpcgcn::cli {

std::string sha256_hex(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

// Everything needed to rerun a command: the argument vector, the config, the
// seed and a digest of every input file.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::optional<std::string> config_json;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::vector<std::string> outputs;
  std::string tool_version;

  void add_input(const std::filesystem::path& path);
};

std::string manifest_to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);

const char* tool_version();

}  // namespace tpcgcn::cli
