#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dirlab/equidist.hpp"
#include "dirlab/flows.hpp"
#include "dirlab/manifest.hpp"
#include "dirlab/sl4_counterexample.hpp"
#include "suites.hpp"

namespace dirlab::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kZeta = 1.3247179572447460;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void Finish(const std::string& command, const json& config,
            Clock::time_point start, const std::string& out,
            std::vector<OutputFile> outputs) {
  const json manifest = MakeManifest(command, config, Seconds(start), outputs);
  const OutputFile m = WriteOutput(out, "manifest.json", manifest.dump(2) + "\n");
  for (const auto& f : outputs) {
    std::cout << out << "/" << f.name << "  crc32 " << f.checksum << "\n";
  }
  std::cout << out << "/" << m.name << "\n";
}

void RequireSize(const std::vector<double>& v, std::size_t n, const char* flag) {
  if (!v.empty() && v.size() != n) {
    throw UsageError(std::string(flag) + " takes " + std::to_string(n) +
                     " comma-separated values");
  }
}

WeightVector Weights(const std::vector<double>& w) {
  RequireSize(w, 2, "--weights");
  return WeightVector::Make(w.at(0), w.at(1));
}

CurveSpec LoadCurveFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open curve file " + path);
  const json j = json::parse(in);
  if (!j.contains("x") || !j.contains("y")) {
    throw UsageError("curve file needs \"x\" and \"y\" coefficient arrays");
  }
  CurveSpec c = CurveSpec::Polynomial(j["x"].get<std::vector<double>>(),
                                      j["y"].get<std::vector<double>>());
  c.name = "file:" + path;
  return c;
}

/// Hand relation on (x, y, z) that makes the example element fail for sigma.
std::string ViolatedRelation(const std::array<int, 3>& xyz,
                             const Permutation& sigma) {
  const auto [x, y, z] = xyz;
  std::string perm;
  for (int i : sigma) perm += std::to_string(i + 1);
  std::vector<std::string> held;
  if (x + y + 2 * z == 0) held.push_back("x + y + 2z = 0");
  if (x == 0) held.push_back("x = 0");
  if (y == 0) held.push_back("y = 0");
  std::string rel = held.empty() ? "derivative inside u+_sigma + Ad h" : "";
  for (std::size_t i = 0; i < held.size(); ++i) {
    rel += (i ? " and " : "") + held[i];
  }
  return rel + " (sigma = " + perm + ")";
}

}  // namespace

int RunSystole(const SystoleArgs& args) {
  const auto start = Clock::now();
  RequireSize(args.v, 2, "--v");
  const Eigen::Vector2d v(args.v.at(0), args.v.at(1));
  const WeightVector r = Weights(args.weights);
  TrajectoryConfig cfg = TrajectoryConfig::WithDefaultSampling(args.T);
  if (args.samples > 0) cfg.t_samples = args.samples;
  cfg.Validate();
  const SystoleSeries series = ComputeSystoleSeries(v, r, cfg);

  std::ostringstream csv;
  WriteSystoleSeriesCsv(csv, series);
  const json summary = {{"v", args.v},
                        {"weights", {r.r1, r.r2}},
                        {"T", args.T},
                        {"samples", cfg.t_samples},
                        {"min", series.Min()},
                        {"max", series.Max()},
                        {"tail_max", series.TailMax()}};
  std::vector<OutputFile> outputs;
  outputs.push_back(WriteOutput(args.out, "systole_series.csv", csv.str()));
  outputs.push_back(
      WriteOutput(args.out, "systole_summary.json", summary.dump(2) + "\n"));
  std::printf("min %.6f  max %.6f  tail max %.6f\n", series.Min(),
              series.Max(), series.TailMax());
  const json config = {{"v", args.v},       {"weights", args.weights},
                       {"T", args.T},       {"samples", cfg.t_samples},
                       {"out", args.out}};
  Finish("systole", config, start, args.out, outputs);
  return 0;
}

int RunEquidistCommand(const EquidistArgs& args) {
  const auto start = Clock::now();
  const WeightVector r = Weights(args.weights);
  const Observable obs = Observable::SiegelBall(args.radius);
  ExperimentConfig cfg;
  cfg.T = args.T;
  cfg.s_samples = args.s_samples;
  cfg.t_samples = args.t_samples;
  cfg.threads = args.threads;
  cfg.Validate();
  RequireSize(args.line, 2, "--line");
  RequireSize(args.interval, 2, "--interval");

  json config = {{"mode", args.mode},           {"weights", args.weights},
                 {"T", args.T},                 {"radius", args.radius},
                 {"s-samples", args.s_samples}, {"t-samples", args.t_samples},
                 {"out", args.out}};
  EquidistReport rep;
  if (args.mode == "line") {
    const double a = args.line.empty() ? 1.0 : args.line.at(0);
    const double b = args.line.empty() ? kZeta * kZeta - kZeta : args.line.at(1);
    const double lo = args.interval.empty() ? 0.0 : args.interval.at(0);
    const double hi = args.interval.empty() ? 1.0 : args.interval.at(1);
    config["line"] = {a, b};
    config["interval"] = {lo, hi};
    rep = LineEquidistExperiment(LineSpec::Make(a, b, lo, hi),
                                 StandardLattice(3), UniformDensity, r, obs,
                                 cfg);
  } else {
    CurveSpec curve;
    if (args.curve == "parabola") {
      curve = CurveSpec::Parabola(args.shift);
      config["shift"] = args.shift;
    } else if (args.curve == "circle") {
      curve = CurveSpec::Circle();
    } else if (args.curve == "line") {
      curve = CurveSpec::Line();
    } else {
      if (args.curve_file.empty()) {
        throw UsageError("--curve file requires --curve-file");
      }
      curve = LoadCurveFile(args.curve_file);
      config["curve-file"] = args.curve_file;
    }
    if (!args.interval.empty()) {
      curve.s_lo = args.interval.at(0);
      curve.s_hi = args.interval.at(1);
    }
    config["curve"] = args.curve;
    config["interval"] = {curve.s_lo, curve.s_hi};
    rep = CurveEquidistExperiment(curve, r, obs, cfg);
  }

  if (args.hypothesis_floor > 0.0) {
    config["hypothesis-floor"] = args.hypothesis_floor;
    if (rep.hypothesis_diagnostic < args.hypothesis_floor) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "hypothesis diagnostic %.6g below floor %.6g",
                    rep.hypothesis_diagnostic, args.hypothesis_floor);
      throw Error(ErrorCode::kInvalidArgument, buf);
    }
  }

  std::ostringstream csv;
  WritePartialAveragesCsv(csv, rep);
  std::vector<OutputFile> outputs;
  outputs.push_back(
      WriteOutput(args.out, "equidist_report.json", ToJson(rep).dump(2) + "\n"));
  outputs.push_back(WriteOutput(args.out, "partial_averages.csv", csv.str()));
  std::printf("average %.6f  target %.6f  rel_error %.4f  diagnostic %.4f\n",
              rep.average, rep.target.value_or(NAN),
              rep.rel_error.value_or(NAN), rep.hypothesis_diagnostic);
  Finish("equidist", config, start, args.out, outputs);
  return 0;
}

int RunCounterexample(const CounterexampleArgs& args) {
  const auto start = Clock::now();
  std::array<int, 3> xyz{};
  json config = {{"s-grid", args.s_grid},
                 {"T", args.T},
                 {"denominator", args.denominator},
                 {"out", args.out}};
  if (args.search) {
    xyz = FindAdmissibleXyz(args.seed);
    config["search"] = true;
    config["seed"] = args.seed;
  } else {
    if (args.xyz.size() != 3) throw UsageError("give --xyz x,y,z or --search");
    xyz = {args.xyz[0], args.xyz[1], args.xyz[2]};
    const PElement example = PElement::Example(xyz[0], xyz[1], xyz[2]);
    for (const auto& sigma : AllPermutations(4)) {
      if (!RelationMembershipTest(example, sigma).outside) {
        throw Error(ErrorCode::kInvalidArgument,
                    "(x, y, z) not admissible: " + ViolatedRelation(xyz, sigma));
      }
    }
  }
  config["xyz"] = xyz;
  std::printf("xyz = (%d, %d, %d)\n", xyz[0], xyz[1], xyz[2]);

  // An unstable rank decision at the rounded base point is retried with a
  // finer rational approximation.
  std::int64_t denominator = args.denominator;
  std::optional<SegmentConstruction> built;
  for (int attempt = 0;; ++attempt) {
    try {
      built = BuildSegmentConstruction(xyz, DefaultAnchorTarget(), denominator);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRankTestUnstable || attempt == 4) throw;
      std::fprintf(stderr, "rank test unstable at denominator %lld, retrying\n",
                   static_cast<long long>(denominator));
      denominator *= 2;
    }
  }
  const SegmentConstruction& c = *built;
  config["denominator_used"] = denominator;
  if (!c.admissible) {
    throw Error(ErrorCode::kInvalidArgument,
                "constructed base point fails the membership test");
  }
  const auto verdicts = VerifySegment(c, args.s_grid, args.T, args.threads);

  std::ostringstream csv;
  WriteVerdictCsv(csv, verdicts);
  std::vector<OutputFile> outputs;
  outputs.push_back(
      WriteOutput(args.out, "construction.json", ToJson(c).dump(2) + "\n"));
  outputs.push_back(WriteOutput(args.out, "verdicts.csv", csv.str()));
  std::cout << csv.str();
  Finish("counterexample", config, start, args.out, outputs);
  return 0;
}

int RunSelftest(const SelftestArgs& args) {
  const bool all = args.suite == "all";
  std::vector<suites::SuiteResult> results;
  if (all || args.suite == "svp") {
    const long n3 = args.cases > 0 ? args.cases : 200;
    results.push_back(suites::SvpOracleSuite(n3, (n3 + 4) / 5, args.seed));
  }
  if (all || args.suite == "hajos") {
    results.push_back(suites::HajosRoundTripSuite(
        args.cases > 0 ? args.cases : 200, args.seed + 1));
  }
  if (all || args.suite == "conjugation") {
    results.push_back(suites::ConjugationSuite(
        args.cases > 0 ? args.cases : 1000, args.seed + 2));
  }
  if (all || args.suite == "adjoint") {
    results.push_back(
        suites::AdjointPatternSuite(args.cases > 0 ? args.cases : 20, args.seed + 3));
  }
  bool ok = true;
  std::printf("%-12s %8s %8s  %s\n", "suite", "cases", "failed", "detail");
  for (const auto& r : results) {
    std::printf("%-12s %8ld %8ld  %s  %s\n", r.name.c_str(), r.cases,
                r.failures, r.passed() ? "PASS" : "FAIL", r.detail.c_str());
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace dirlab::cli
