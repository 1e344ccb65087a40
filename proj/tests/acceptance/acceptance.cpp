#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirlab/diophantine.hpp"
#include "dirlab/equidist.hpp"
#include "dirlab/manifest.hpp"
#include "dirlab/sl4_counterexample.hpp"
#include "suites.hpp"

namespace {

using namespace dirlab;
using Clock = std::chrono::steady_clock;

constexpr double kZeta = 1.3247179572447460;
constexpr std::uint64_t kSeed = 20240601;

// Pinned tolerances.
constexpr double kSvpSeconds = 60.0;
constexpr double kHajosSeconds = 120.0;
constexpr double kEquidistRelTol = 0.15;
constexpr double kEquidistSeconds = 600.0;
constexpr double kWronskianTol = 1e-12;
constexpr double kNoImprovementShare = 0.90;
constexpr double kDivergedSystole = 1e-2;
constexpr double kZetaScore = 0.104258;
constexpr double kZetaScoreTol = 1e-6;
constexpr double kZetaMinSystole = 0.20773;
constexpr double kZetaMinSystoleTol = 5e-5;
constexpr double kRationalMinSystole = 1e-9;
constexpr double kFactorizationTol = 1e-10;
constexpr double kTailCeiling = 1.0 - kSegmentK1Margin;
constexpr double kC0 = 0.30;
constexpr double kPipelineSeconds = 300.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Fmt(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

Outcome SuiteOutcome(const suites::SuiteResult& r, double seconds, double limit) {
  return {r.passed() && seconds < limit,
          Fmt("%ld cases, %ld failed, %s, %.2f s (limit %.0f s)", r.cases,
              r.failures, r.detail.c_str(), seconds, limit)};
}

Outcome Criterion1() {
  const auto t0 = Clock::now();
  const auto r = suites::SvpOracleSuite(1000, 200, kSeed);
  return SuiteOutcome(r, Since(t0), kSvpSeconds);
}

Outcome Criterion2() {
  const auto t0 = Clock::now();
  const auto r = suites::HajosRoundTripSuite(1000, kSeed + 1);
  return SuiteOutcome(r, Since(t0), kHajosSeconds);
}

Outcome Criterion3() {
  const auto r = suites::ConjugationSuite(1000, kSeed + 2);
  return {r.passed(), Fmt("%ld cases, %s", r.cases, r.detail.c_str())};
}

ExperimentConfig DefaultConfig(int threads) {
  ExperimentConfig cfg;
  cfg.threads = threads;
  return cfg;
}

EquidistReport ZetaLine(const WeightVector& r, int threads) {
  return LineEquidistExperiment(LineSpec::Make(1, kZeta * kZeta - kZeta, 0, 1),
                                StandardLattice(3), UniformDensity, r,
                                Observable::SiegelBall(0.75),
                                DefaultConfig(threads));
}

std::string EquidistChecksum(const EquidistReport& rep) {
  std::ostringstream csv;
  WritePartialAveragesCsv(csv, rep);
  return Crc32Hex(ToJson(rep).dump(2) + "\n") + "/" + Crc32Hex(csv.str());
}

Outcome Criterion4() {
  bool pass = true;
  std::string detail;
  for (const WeightVector r : {WeightVector{0.5, 0.5}, WeightVector{2.0 / 3, 1.0 / 3}}) {
    const auto t0 = Clock::now();
    const EquidistReport rep = ZetaLine(r, 1);
    const double secs = Since(t0);
    pass = pass && *rep.rel_error <= kEquidistRelTol && secs < kEquidistSeconds;
    detail += Fmt("r=(%.3f,%.3f) avg %.4f rel %.3f %.1f s; ", r.r1, r.r2,
                  rep.average, *rep.rel_error, secs);
  }
  return {pass, detail + "target 3.375, tol 15%"};
}

Outcome Criterion5() {
  const CurveSpec parabola = CurveSpec::Parabola();
  double w_dev = 0.0;
  for (int k = 0; k <= 100; ++k) {
    w_dev = std::max(w_dev, std::abs(Wronskian(parabola, k / 100.0) - 2.0));
  }
  const auto t0 = Clock::now();
  const EquidistReport rep =
      CurveEquidistExperiment(parabola, WeightVector{0.5, 0.5},
                              Observable::SiegelBall(0.75), DefaultConfig(1));
  const double secs = Since(t0);
  const bool pass = *rep.rel_error <= kEquidistRelTol && w_dev <= kWronskianTol &&
                    secs < kEquidistSeconds;
  return {pass, Fmt("avg %.4f rel %.3f, Wronskian 2 (max dev %.1e), %.1f s",
                    rep.average, *rep.rel_error, w_dev, secs)};
}

Outcome Criterion6() {
  const WeightVector r{0.5, 0.5};
  std::mt19937_64 rng(kSeed + 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int no_improvement = 0;
  double best_tail = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector2d v(unit(rng), unit(rng));
    const auto rep = DynamicalDiIndicator(v, r, 30.0);
    best_tail = std::max(best_tail, rep.limsup_estimate);
    if (rep.verdict == DiVerdict::kNoImprovementEvidence) ++no_improvement;
  }
  const bool part_a = no_improvement >= kNoImprovementShare * 100;

  std::uniform_int_distribution<int> den_d(1, 10);
  int improved = 0;
  double worst_final = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int den = den_d(rng);
    std::uniform_int_distribution<int> num_d(0, den);
    const Eigen::Vector2d v(double(num_d(rng)) / den, double(num_d(rng)) / den);
    const auto rep = DynamicalDiIndicator(v, r, 30.0);
    const double final_systole = rep.series.systole.back();
    worst_final = std::max(worst_final, final_systole);
    if (rep.verdict == DiVerdict::kImprovementEvidence &&
        rep.late_max < 1.0 - kImprovementMargin && final_systole <= kDivergedSystole) {
      ++improved;
    }
  }
  const bool part_b = improved == 20;
  return {part_a && part_b,
          Fmt("(a) %d/100 no-improvement evidence (need >= 90; best tail max "
              "%.3f < 0.98) %s; (b) %d/20 improvement evidence, max final "
              "systole %.1e %s",
              no_improvement, best_tail, part_a ? "pass" : "FAIL", improved,
              worst_final, part_b ? "pass" : "FAIL")};
}

Outcome Criterion7() {
  const WeightVector r{0.5, 0.5};
  const auto zeta = DaniCrossCheck(Eigen::Vector2d(kZeta, kZeta * kZeta), r, 100000, 30);
  const auto rat = DaniCrossCheck(Eigen::Vector2d(0.5, 1.0 / 3), r, 100000, 30);
  const bool pass = zeta.score.score > 0 && zeta.min_systole > 0 &&
                    std::abs(zeta.score.score - kZetaScore) <= kZetaScoreTol &&
                    std::abs(zeta.min_systole - kZetaMinSystole) <= kZetaMinSystoleTol &&
                    rat.score.score == 0.0 && rat.min_systole < kRationalMinSystole &&
                    zeta.consistent() && rat.consistent();
  return {pass, Fmt("zeta: score %.6f (pinned %.6f), min systole %.5f (pinned "
                    "%.5f); (1/2,1/3): score %g, min systole %.1e",
                    zeta.score.score, kZetaScore, zeta.min_systole,
                    kZetaMinSystole, rat.score.score, rat.min_systole)};
}

int Position(const Permutation& s, int v) {
  for (int i = 0; i < 4; ++i) {
    if (s[i] == v) return i;
  }
  return -1;
}

bool InUPlus(const Permutation& s, int i, int j) {
  return Position(s, i - 1) < Position(s, j - 1);
}

bool HandRelationsHold(int x, int y, int z, const Permutation& s) {
  if (!InUPlus(s, 3, 1) && x != 0) return false;
  if (!InUPlus(s, 3, 2) && y != 0) return false;
  const bool plane = x + y + 2 * z == 0;
  if (!InUPlus(s, 1, 2) && !InUPlus(s, 1, 3) && !plane) return false;
  if (!InUPlus(s, 2, 1) && !InUPlus(s, 2, 3) && !plane) return false;
  return true;
}

const std::vector<double> kSegmentGrid{-0.1, -0.05, 0.0, 0.05, 0.1};

std::string PipelineChecksum(const SegmentConstruction& c,
                             const std::vector<SegmentVerdict>& v) {
  std::ostringstream csv;
  WriteVerdictCsv(csv, v);
  return Crc32Hex(ToJson(c).dump(2) + "\n") + "/" + Crc32Hex(csv.str());
}

Outcome Criterion8() {
  const auto t0 = Clock::now();
  int admissible_ok = 0;
  for (const auto& sigma : AllPermutations(4)) {
    admissible_ok += RelationMembershipTest(PElement::Example(1, 1, 1), sigma).outside;
  }
  int class_mismatch = 0;
  for (const auto& xyz : {std::array<int, 3>{1, 1, -1}, {0, 0, 1}}) {
    const PElement p = PElement::Example(xyz[0], xyz[1], xyz[2]);
    for (const auto& sigma : AllPermutations(4)) {
      const bool inside = !RelationMembershipTest(p, sigma).outside;
      if (inside != HandRelationsHold(xyz[0], xyz[1], xyz[2], sigma)) ++class_mismatch;
    }
  }

  const SegmentConstruction c = BuildSegmentConstruction({1, 1, 1});
  double residual = 0.0;
  for (int k = -50; k <= 50; ++k) {
    const double s = c.params.s_star * k / 50.0;
    residual = std::max(residual, SolveFactorization(c.p, s).residual);
  }
  const auto verdicts = VerifySegment(c, kSegmentGrid, 30.0, 1);
  double off_center_tail = 0.0;
  double center_min = 0.0;
  for (const auto& v : verdicts) {
    if (v.s == 0.0) {
      center_min = v.min_systole;
    } else {
      off_center_tail = std::max(off_center_tail, v.max_tail_systole);
    }
  }
  const double secs = Since(t0);
  const bool pass = admissible_ok == 24 && class_mismatch == 0 && c.admissible &&
                    residual <= kFactorizationTol && off_center_tail <= kTailCeiling &&
                    center_min >= kC0 && secs < kPipelineSeconds;
  return {pass, Fmt("(1,1,1) outside for %d/24 sigma; hand-relation class "
                    "mismatches %d; residual %.1e; max tail at s!=0 %.4f "
                    "(<= %.2f); min at s=0 %.4f (c0 = %.2f); %.2f s",
                    admissible_ok, class_mismatch, residual, off_center_tail,
                    kTailCeiling, center_min, kC0, secs)};
}

Outcome Criterion9() {
  const WeightVector r{0.5, 0.5};
  const std::string e1 = EquidistChecksum(ZetaLine(r, 1));
  const std::string e2 = EquidistChecksum(ZetaLine(r, 2));
  const SegmentConstruction c = BuildSegmentConstruction({1, 1, 1});
  const std::string p1 = PipelineChecksum(c, VerifySegment(c, kSegmentGrid, 30.0, 1));
  const std::string p2 = PipelineChecksum(c, VerifySegment(c, kSegmentGrid, 30.0, 2));
  return {e1 == e2 && p1 == p2,
          Fmt("equidist %s vs %s; counterexample %s vs %s (threads 1 vs 2)",
              e1.c_str(), e2.c_str(), p1.c_str(), p2.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "SVP oracle equivalence", Criterion1},
      {2, "Hajos round-trip", Criterion2},
      {3, "conjugation identity", Criterion3},
      {4, "line equidistribution", Criterion4},
      {5, "curve equidistribution", Criterion5},
      {6, "DI dichotomy evidence", Criterion6},
      {7, "Dani cross-check", Criterion7},
      {8, "counterexample pipeline", Criterion8},
      {9, "determinism across thread counts", Criterion9},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
