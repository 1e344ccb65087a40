#include "dirlab/diophantine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dirlab {

namespace {

template <typename Scalar>
bool TryDirichlet(const Eigen::VectorXd& v, double Q, DirichletSolution* out) {
  using std::abs;
  using std::pow;
  const int n = static_cast<int>(v.size());
  const Scalar bound = pow(Scalar(Q), Scalar(-1) / Scalar(n));
  const auto q_hi = static_cast<std::int64_t>(std::floor(Q));
  for (std::int64_t q = 1; q <= q_hi; ++q) {
    Scalar worst = 0;
    IntVector p(n);
    for (int i = 0; i < n; ++i) {
      const Scalar x = Scalar(q) * Scalar(v(i));
      const Scalar pi = RoundHalfTowardZero(x);
      p(i) = static_cast<std::int64_t>(pi);
      worst = std::max(worst, Scalar(abs(x - pi)));
      if (!(worst < bound)) break;
    }
    if (worst < bound) {
      out->q = q;
      out->p = p;
      out->defect = ToDouble(worst);
      return true;
    }
  }
  return false;
}

}  // namespace

DirichletSolution DirichletSolve(const Eigen::VectorXd& v, double Q) {
  if (!(Q >= 1.0) || v.size() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need Q >= 1 and nonempty v");
  }
  DirichletSolution sol;
  if (TryDirichlet<double>(v, Q, &sol)) return sol;
  if (TryDirichlet<Real50>(v, Q, &sol)) return sol;
  throw Error(ErrorCode::kNoSolution,
              "no q <= Q found; Dirichlet's theorem guarantees one");
}

std::string DiScanReport::verdict() const {
  if (failures.empty()) return "improvement-compatible on range";
  std::ostringstream os;
  os.precision(12);
  os << "improvement refuted at Q=" << failures.front();
  return os.str();
}

std::vector<double> GeometricGrid(double lo, double hi, int steps) {
  std::vector<double> grid;
  if (steps == 1) return {lo};
  const double ratio = std::log(hi / lo) / (steps - 1);
  for (int k = 0; k < steps; ++k) grid.push_back(lo * std::exp(ratio * k));
  grid.back() = hi;
  return grid;
}

bool HasSigmaImprovement(const Eigen::Vector2d& v, double sigma,
                         const WeightVector& r, double Q) {
  const double b1 = sigma * std::pow(Q, -r.r1);
  const double b2 = sigma * std::pow(Q, -r.r2);
  const double q_limit = sigma * Q;
  for (std::int64_t q = 1; static_cast<double>(q) < q_limit; ++q) {
    if (NearestIntegerDefect(q, v(0)) < b1 &&
        NearestIntegerDefect(q, v(1)) < b2) {
      return true;
    }
  }
  return false;
}

DiScanReport DiSigmaScan(const Eigen::Vector2d& v, double sigma,
                         const WeightVector& r, double q_lo, double q_hi,
                         int q_steps) {
  if (!(sigma > 0.0 && sigma < 1.0) || !(q_lo >= 1.0) || !(q_hi > q_lo) ||
      q_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "need 0 < sigma < 1, 1 <= Q_lo < Q_hi, Q_steps >= 1");
  }
  DiScanReport report;
  report.v = v;
  report.sigma = sigma;
  report.r = r;
  report.q_grid = GeometricGrid(q_lo, q_hi, q_steps);
  for (double Q : report.q_grid) {
    if (!HasSigmaImprovement(v, sigma, r, Q)) report.failures.push_back(Q);
  }
  return report;
}

nlohmann::json ToJson(const DiScanReport& report) {
  return {{"v", {report.v(0), report.v(1)}},
          {"sigma", report.sigma},
          {"r", {report.r.r1, report.r.r2}},
          {"failures", report.failures},
          {"verdict", report.verdict()}};
}

double NearestIntegerDefect(std::int64_t q, double x) {
  const double qd = static_cast<double>(q);
  const double rounded = qd * x;
  return std::abs(rounded - std::round(rounded));
}

double ExactNearestIntegerDefect(std::int64_t q, double x) {
  // q x = hi + lo exactly (Dekker two-product via fma).
  const double qd = static_cast<double>(q);
  const double hi = qd * x;
  const double lo = std::fma(qd, x, -hi);
  const double frac = hi - std::round(hi);
  double d = frac + lo;
  d -= std::round(d);
  return std::abs(d);
}

namespace {

double WeightedPower(double defect, double weight) {
  if (weight == 0.5) return defect * defect;
  return std::pow(defect, 1.0 / weight);
}

}  // namespace

BadApproxScore ComputeBadApproxScore(const Eigen::Vector2d& v,
                                     const WeightVector& r,
                                     std::int64_t q_max) {
  if (q_max < 1) {
    throw Error(ErrorCode::kInvalidArgument, "q_max must be >= 1");
  }
  BadApproxScore s;
  s.q_max = q_max;
  s.score = std::numeric_limits<double>::infinity();
  const auto defect = q_max > kExactProductThreshold ? ExactNearestIntegerDefect
                                                     : NearestIntegerDefect;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const double a = WeightedPower(defect(q, v(0)), r.r1);
    const double b = WeightedPower(defect(q, v(1)), r.r2);
    const double value = static_cast<double>(q) * std::max(a, b);
    if (value < s.score) {
      s.score = value;
      s.argmin_q = q;
      if (value == 0.0) break;
    }
  }
  return s;
}

const char* VerdictName(DiVerdict verdict) {
  switch (verdict) {
    case DiVerdict::kNoImprovementEvidence: return "no-improvement evidence";
    case DiVerdict::kImprovementEvidence: return "improvement evidence";
    case DiVerdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

DiIndicatorReport DynamicalDiIndicator(const Eigen::Vector2d& v,
                                       const WeightVector& r, double T) {
  if (!(T > 0.0)) throw Error(ErrorCode::kInvalidArgument, "T must be > 0");
  DiIndicatorReport rep;
  rep.series =
      ComputeSystoleSeries(v, r, TrajectoryConfig::WithDefaultSampling(T));
  rep.limsup_estimate = rep.series.TailMax(0.2);
  rep.late_max = rep.series.MaxOver(T / 2, T);
  if (rep.limsup_estimate >= 1.0 - kK1Margin) {
    rep.verdict = DiVerdict::kNoImprovementEvidence;
  } else if (rep.late_max <= 1.0 - kImprovementMargin) {
    rep.verdict = DiVerdict::kImprovementEvidence;
  } else {
    rep.verdict = DiVerdict::kInconclusive;
  }
  return rep;
}

DaniReport DaniCrossCheck(const Eigen::Vector2d& v, const WeightVector& r,
                          std::int64_t q_max, double T,
                          const DaniThresholds& th) {
  DaniReport rep;
  rep.score = ComputeBadApproxScore(v, r, q_max);
  rep.min_systole =
      ComputeSystoleSeries(v, r, TrajectoryConfig::WithDefaultSampling(T))
          .Min();
  rep.bounded_consistent =
      !(rep.score.score > th.score_bounded) ||
      rep.min_systole > th.systole_bounded;
  rep.divergent_consistent =
      !(rep.score.score < th.score_small) || rep.min_systole < th.systole_dip;
  return rep;
}

}  // namespace dirlab
