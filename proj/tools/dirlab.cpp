#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "dirlab/manifest.hpp"
#include "dirlab/numeric.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 64;

std::string ScalarArg(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw std::runtime_error("unsupported config value " + v.dump());
}

/// Config keys become `--key value` pairs; arrays are comma-joined and true
/// booleans become bare flags.
std::vector<std::string> ConfigArgs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  const json cfg = json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config must be an object");
  std::vector<std::string> args;
  for (const auto& [key, value] : cfg.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
      continue;
    }
    std::string joined;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) joined += ',';
        joined += ScalarArg(value[i]);
      }
    } else {
      joined = ScalarArg(value);
    }
    args.push_back("--" + key + "=" + joined);
  }
  return args;
}

/// Moves `--config FILE` out of argv and splices its arguments in right after
/// the subcommand, so explicit flags that follow take precedence.
std::vector<std::string> ExpandConfig(int argc, char** argv) {
  std::vector<std::string> in(argv + 1, argv + argc);
  std::vector<std::string> rest;
  std::string config;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == "--config" && i + 1 < in.size()) {
      config = in[++i];
    } else if (in[i].rfind("--config=", 0) == 0) {
      config = in[i].substr(9);
    } else {
      rest.push_back(in[i]);
    }
  }
  if (config.empty() || rest.empty()) return rest;
  std::vector<std::string> out{rest.front()};
  for (auto& a : ConfigArgs(config)) out.push_back(std::move(a));
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dirlab::cli;

  CLI::App app{"Lattice flows, Diophantine approximation and equidistribution"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string("dirlab ") + dirlab::kVersion);

  SystoleArgs systole;
  EquidistArgs equidist;
  CounterexampleArgs counter;
  SelftestArgs selftest;
  std::string threads_text;

  auto add_common = [&](CLI::App* sub, std::string* out) {
    sub->add_option("--out", *out, "Output directory");
    sub->add_option("--config", "JSON file of flag values (flags override)");
  };

  auto* sys = app.add_subcommand("systole", "Systole along f_t u(v) Z^3");
  sys->add_option("--v", systole.v, "v1,v2")->required()->delimiter(',')
      ->expected(2);
  sys->add_option("--weights", systole.weights, "r1,r2")->delimiter(',')
      ->expected(2);
  sys->add_option("--T", systole.T, "Time horizon")->check(CLI::PositiveNumber);
  sys->add_option("--samples", systole.samples, "Number of time steps")
      ->check(CLI::PositiveNumber);
  add_common(sys, &systole.out);

  auto* eq = app.add_subcommand("equidist", "Expanding-translate averages");
  eq->add_option("--mode", equidist.mode)
      ->check(CLI::IsMember({"line", "curve"}));
  eq->add_option("--line", equidist.line, "a,b")->delimiter(',')->expected(2);
  eq->add_option("--curve", equidist.curve)
      ->check(CLI::IsMember({"parabola", "circle", "line", "file"}));
  eq->add_option("--curve-file", equidist.curve_file,
                 "JSON {\"x\": [...], \"y\": [...]} polynomial coefficients");
  eq->add_option("--shift", equidist.shift, "Parabola (s, s^2 + shift)");
  eq->add_option("--interval", equidist.interval, "lo,hi")->delimiter(',')
      ->expected(2);
  eq->add_option("--weights", equidist.weights, "r1,r2")->delimiter(',')
      ->expected(2);
  eq->add_option("--T", equidist.T)->check(CLI::PositiveNumber);
  eq->add_option("--radius", equidist.radius)->check(CLI::Range(1e-9, 1.0));
  eq->add_option("--s-samples", equidist.s_samples)->check(CLI::PositiveNumber);
  eq->add_option("--t-samples", equidist.t_samples)->check(CLI::PositiveNumber);
  eq->add_option("--threads", threads_text, "Positive integer or auto");
  eq->add_option("--hypothesis-floor", equidist.hypothesis_floor,
                 "Abort when the hypothesis diagnostic falls below this");
  add_common(eq, &equidist.out);

  auto* ce = app.add_subcommand("counterexample", "Segment construction in X_4");
  auto* xyz = ce->add_option("--xyz", counter.xyz, "x,y,z")->delimiter(',')
                  ->expected(3);
  auto* search = ce->add_flag("--search", counter.search,
                              "Seeded search for an admissible triple");
  xyz->excludes(search);
  ce->add_option("--seed", counter.seed);
  ce->add_option("--s-grid", counter.s_grid, "Comma-separated s values")
      ->delimiter(',');
  ce->add_option("--T", counter.T)->check(CLI::PositiveNumber);
  ce->add_option("--denominator", counter.denominator)
      ->check(CLI::PositiveNumber);
  ce->add_option("--threads", threads_text, "Positive integer or auto");
  add_common(ce, &counter.out);

  auto* st = app.add_subcommand("selftest", "Oracle-equivalence suites");
  st->add_option("--suite", selftest.suite)
      ->check(CLI::IsMember({"all", "svp", "hajos", "conjugation", "adjoint"}));
  st->add_option("--cases", selftest.cases)->check(CLI::PositiveNumber);
  st->add_option("--seed", selftest.seed);

  std::vector<std::string> args;
  try {
    args = ExpandConfig(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "dirlab: " << e.what() << "\n";
    return kExitUsage;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  int threads = 0;
  if (!threads_text.empty()) {
    if (threads_text == "auto") {
      threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    } else {
      try {
        threads = std::stoi(threads_text);
      } catch (const std::exception&) {
        threads = 0;
      }
      if (threads <= 0) {
        std::cerr << "dirlab: --threads must be a positive integer or auto\n";
        return kExitUsage;
      }
    }
  }
  equidist.threads = threads;
  counter.threads = threads;

  const char* name = app.get_subcommands().front()->get_name().c_str();
  try {
    if (*sys) return RunSystole(systole);
    if (*eq) return RunEquidistCommand(equidist);
    if (*ce) return RunCounterexample(counter);
    return RunSelftest(selftest);
  } catch (const UsageError& e) {
    std::cerr << "dirlab " << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const dirlab::Error& e) {
    std::cerr << "dirlab " << name << ": " << e.what() << "\n";
    return e.code() == dirlab::ErrorCode::kSearchExhausted ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "dirlab " << name << ": " << e.what() << "\n";
    return 2;
  }
}
