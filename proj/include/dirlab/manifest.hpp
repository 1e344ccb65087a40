#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dirlab {

inline constexpr const char* kVersion = "0.1.0";

/// CRC-32 of `data` as 8 lowercase hex digits.
std::string Crc32Hex(const std::string& data);

struct OutputFile {
  std::string name;
  std::string checksum;
};

/// Writes `contents` to dir/name (creating dir) and records its checksum.
OutputFile WriteOutput(const std::filesystem::path& dir,
                       const std::string& name, const std::string& contents);

/// {"command", "config", "version", "wall_time_seconds", "outputs": {name: crc}}
nlohmann::json MakeManifest(const std::string& command,
                            const nlohmann::json& config, double wall_seconds,
                            const std::vector<OutputFile>& outputs);

}  // namespace dirlab
