#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

#include "nvthermo/errors.hpp"
#include "nvthermo/version.hpp"

namespace nvthermo::io {

/// Hex SHA-256 of a byte string.
inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return o.str();
}

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "' for hashing");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256
  std::uint64_t seed = 0;
  std::string tool_version = version;
  std::string timestamp;
  nlohmann::json extra = nlohmann::json::object();

  void add_input(const std::filesystem::path& p) { inputs.emplace_back(p.string(), sha256_file(p)); }
  void add_output(const std::filesystem::path& p) { outputs.emplace_back(p.string(), sha256_file(p)); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["arguments"] = arguments;
    j["config_sha256"] = config_hash;
    j["seed"] = seed;
    j["tool_version"] = tool_version;
    j["timestamp"] = timestamp;
    auto files = [](const auto& list) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& [p, h] : list) a.push_back({{"path", p}, {"sha256", h}});
      return a;
    };
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    if (!extra.empty()) j["details"] = extra;
    return j;
  }
};

/// UTC time as ISO 8601.
inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

}  // namespace nvthermo::io
