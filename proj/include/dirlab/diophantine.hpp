#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dirlab/flows.hpp"

namespace dirlab {

/// q >= 1 and p with defect = |q v - p|_inf.
struct DirichletSolution {
  std::int64_t q = 1;
  IntVector p;
  double defect = 0.0;
};

/// Smallest q in [1, Q] with |q v - p|_inf < Q^{-1/n}, n = v.size(); p is the
/// coordinatewise nearest integer (halves toward 0). Falls back to Real50
/// when double arithmetic misses a boundary solution.
DirichletSolution DirichletSolve(const Eigen::VectorXd& v, double Q);

/// Outcome of scanning Q for weighted sigma-improvements.
struct DiScanReport {
  Eigen::Vector2d v;
  double sigma = 0.0;
  WeightVector r;
  std::vector<double> q_grid;
  /// Q values with no q < sigma Q, p satisfying |q v_i - p_i| < sigma Q^{-r_i}.
  std::vector<double> failures;

  bool compatible() const { return failures.empty(); }
  std::string verdict() const;
};

inline constexpr int kDefaultQSteps = 200;

/// Geometric grid of `q_steps` values from q_lo to q_hi.
std::vector<double> GeometricGrid(double lo, double hi, int steps);

/// True if some 1 <= q < sigma Q admits |q v_i - p_i| < sigma Q^{-r_i}.
bool HasSigmaImprovement(const Eigen::Vector2d& v, double sigma,
                         const WeightVector& r, double Q);

DiScanReport DiSigmaScan(const Eigen::Vector2d& v, double sigma,
                         const WeightVector& r, double q_lo, double q_hi,
                         int q_steps = kDefaultQSteps);

/// {"v": [..], "sigma": .., "r": [..], "failures": [..], "verdict": ".."}
nlohmann::json ToJson(const DiScanReport& report);

/// min over 1 <= q <= q_max of q * max_i |q v_i - p_i(q)|^{1/r_i}.
struct BadApproxScore {
  std::int64_t q_max = 0;
  double score = 0.0;
  std::int64_t argmin_q = 1;
};

/// Above this q_max the products q v_i are formed exactly (double-double).
inline constexpr std::int64_t kExactProductThreshold = 1'000'000;

BadApproxScore ComputeBadApproxScore(const Eigen::Vector2d& v,
                                     const WeightVector& r,
                                     std::int64_t q_max);

/// |q x - round(q x)| with q x rounded to double.
double NearestIntegerDefect(std::int64_t q, double x);

/// |q x - round(q x)| with q x evaluated without rounding error.
double ExactNearestIntegerDefect(std::int64_t q, double x);

enum class DiVerdict {
  kNoImprovementEvidence,
  kImprovementEvidence,
  kInconclusive,
};

const char* VerdictName(DiVerdict verdict);

/// Distance from the K_1 boundary at which a tail maximum counts as reaching K_1.
inline constexpr double kK1Margin = 0.02;
/// Late-time maximum below 1 - kImprovementMargin counts as improvement.
inline constexpr double kImprovementMargin = 0.05;

struct DiIndicatorReport {
  /// Max systole over the last 20% of [0, T].
  double limsup_estimate = 0.0;
  /// Max systole over [T/2, T].
  double late_max = 0.0;
  DiVerdict verdict = DiVerdict::kInconclusive;
  SystoleSeries series;
};

DiIndicatorReport DynamicalDiIndicator(const Eigen::Vector2d& v,
                                       const WeightVector& r, double T);

/// Calibration constants for the bounded <-> badly approximable bridge.
struct DaniThresholds {
  double score_bounded = 1e-2;    // theta_a
  double systole_bounded = 1e-2;  // theta_d
  double score_small = 1e-6;      // theta_a'
  double systole_dip = 1e-2;      // theta_d'
};

struct DaniReport {
  BadApproxScore score;
  double min_systole = 0.0;
  /// score > theta_a implies min systole > theta_d.
  bool bounded_consistent = true;
  /// score < theta_a' implies min systole < theta_d'.
  bool divergent_consistent = true;

  bool consistent() const { return bounded_consistent && divergent_consistent; }
};

DaniReport DaniCrossCheck(const Eigen::Vector2d& v, const WeightVector& r,
                          std::int64_t q_max, double T,
                          const DaniThresholds& thresholds = {});

}  // namespace dirlab
