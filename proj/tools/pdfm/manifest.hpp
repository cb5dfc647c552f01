#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pdfm::cli {

struct RunManifest {
  std::string command_line;
  std::optional<std::uint64_t> seed;
  std::string version;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256 hex
  std::string timestamp;                                    // ISO-8601, UTC
};

std::string sha256_file(const std::filesystem::path& path);
std::string iso8601_now();
std::string quote_command_line(const std::vector<std::string>& args);

RunManifest make_manifest(const std::vector<std::string>& args, std::optional<std::uint64_t> seed,
                          const std::vector<std::filesystem::path>& inputs);

nlohmann::json manifest_to_json(const RunManifest& m);

}  // namespace pdfm::cli
