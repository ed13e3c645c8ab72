#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace warpzsl::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Provenance record written next to every artifact as
/// `<artifact>.manifest.json`. Holds no timestamps, so reruns are
/// byte-identical.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  std::uint64_t seed = 0;

  void write_next_to(const std::filesystem::path& artifact) const;
};

}  // namespace warpzsl::cli
