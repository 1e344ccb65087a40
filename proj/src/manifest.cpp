#include "dirlab/manifest.hpp"

#include <cstdio>
#include <fstream>

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>

#include "dirlab/numeric.hpp"

namespace dirlab {

std::string Crc32Hex(const std::string& data) {
  boost::crc_32_type crc;
  crc.process_bytes(data.data(), data.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
  return buf;
}

OutputFile WriteOutput(const std::filesystem::path& dir,
                       const std::string& name, const std::string& contents) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  out << contents;
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument, "cannot write " + (dir / name).string());
  }
  return {name, Crc32Hex(contents)};
}

nlohmann::json MakeManifest(const std::string& command,
                            const nlohmann::json& config, double wall_seconds,
                            const std::vector<OutputFile>& outputs) {
  nlohmann::json files = nlohmann::json::object();
  for (const auto& f : outputs) files[f.name] = f.checksum;
  return {{"command", command},
          {"config", config},
          {"version", kVersion},
          {"wall_time_seconds", wall_seconds},
          {"outputs", files}};
}

}  // namespace dirlab
