#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirlab::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystoleArgs {
  std::vector<double> v;
  std::vector<double> weights{0.5, 0.5};
  double T = 30.0;
  int samples = 0;
  std::string out = "out";
};

struct EquidistArgs {
  std::string mode = "line";
  /// Defaults to a = 1, b = zeta^2 - zeta.
  std::vector<double> line;
  std::string curve = "parabola";
  std::string curve_file;
  double shift = 0.0;
  std::vector<double> interval;
  std::vector<double> weights{0.5, 0.5};
  double T = 25.0;
  double radius = 0.75;
  int s_samples = 200;
  int t_samples = 2500;
  int threads = 0;
  double hypothesis_floor = 0.0;
  std::string out = "out";
};

struct CounterexampleArgs {
  std::vector<int> xyz;
  bool search = false;
  std::uint64_t seed = 1;
  std::vector<double> s_grid{-0.1, -0.05, 0.0, 0.05, 0.1};
  double T = 30.0;
  std::int64_t denominator = 16;
  int threads = 0;
  std::string out = "out";
};

struct SelftestArgs {
  std::string suite = "all";
  long cases = 0;
  std::uint64_t seed = 20240601;
};

int RunSystole(const SystoleArgs& args);
int RunEquidistCommand(const EquidistArgs& args);
int RunCounterexample(const CounterexampleArgs& args);
int RunSelftest(const SelftestArgs& args);

}  // namespace dirlab::cli
