#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

inline constexpr std::string_view kToolVersion = "wavecast 0.1.0";

std::string sha256_hex(std::string_view bytes);

/// Provenance record written next to every set of outputs. Contains no
/// wall-clock data so identical runs produce identical manifests.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // name, sha256
  std::vector<std::pair<std::string, std::string>> outputs;  // name, sha256

  void add_input(const std::string& name, std::string_view bytes) { inputs.emplace_back(name, sha256_hex(bytes)); }
  void add_output(const std::string& name, std::string_view bytes) { outputs.emplace_back(name, sha256_hex(bytes)); }
  std::string to_json() const;
};

}  // namespace wavecast
