#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dirlab/manifest.hpp"
#include "dirlab/parallel.hpp"

namespace dirlab {
namespace {

TEST(Crc32, CheckValue) {
  EXPECT_EQ(Crc32Hex("123456789"), "cbf43926");
  EXPECT_EQ(Crc32Hex(""), "00000000");
}

TEST(Manifest, RecordsOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "dirlab_manifest_test";
  std::filesystem::remove_all(dir);
  const OutputFile f = WriteOutput(dir, "a.csv", "x\n1\n");
  std::ifstream in(dir / "a.csv");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, "x\n1\n");
  EXPECT_EQ(f.checksum, Crc32Hex("x\n1\n"));
  const auto m = MakeManifest("systole", {{"T", 5}}, 0.5, {f});
  EXPECT_EQ(m["version"], kVersion);
  EXPECT_EQ(m["outputs"]["a.csv"], f.checksum);
  EXPECT_EQ(m["config"]["T"], 5);
  std::filesystem::remove_all(dir);
}

TEST(Parallel, ResolveThreadCount) {
  EXPECT_EQ(ResolveThreadCount(3), 3);
  setenv("DIRLAB_THREADS", "2", 1);
  EXPECT_EQ(ResolveThreadCount(0), 2);
  unsetenv("DIRLAB_THREADS");
  EXPECT_EQ(ResolveThreadCount(0), 1);
}

TEST(Parallel, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  ParallelFor(1000, 4, [&](int i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(ParallelFor(10, 2,
                           [](int i) {
                             if (i == 7) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

}  // namespace
}  // namespace dirlab
