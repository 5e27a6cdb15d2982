#include "manifest.hpp"

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "tpcgcn/bytes.hpp"
#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/checkpoint.hpp"

namespace tpcgcn::cli {

namespace {

std::string digest(const unsigned char* data, std::size_t size) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, size, md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  return digest(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
}

std::string sha256_hex(const std::filesystem::path& path) {
  const auto bytes = bytes::read_file(path);
  return digest(bytes.data(), bytes.size());
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs[path.string()] = sha256_hex(path);
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config_json ? nlohmann::ordered_json::parse(*m.config_json)
                              : nlohmann::ordered_json(nullptr);
  j["seed"] = m.seed;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [path, sha] : m.inputs) inputs[path] = {{"sha256", sha}};
  j["inputs"] = inputs;
  j["outputs"] = m.outputs;
  j["tool_version"] = m.tool_version;
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  tensor::write_file_atomically(path, manifest_to_json(m));
}

const char* tool_version() { return TPCGCN_VERSION; }

}  // namespace tpcgcn::cli
