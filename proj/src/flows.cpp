#include "dirlab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "dirlab/reduction.hpp"
#include "dirlab/svp.hpp"

namespace dirlab {

WeightVector WeightVector::Make(double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0) || std::abs(r1 + r2 - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument,
                "weights must be positive and sum to 1");
  }
  return {r1, r2};
}

Eigen::Matrix3d FlowMatrix(const WeightVector& r, double t) {
  return r.exponents().unaryExpr([t](double e) { return std::exp(e * t); })
      .asDiagonal();
}

Eigen::MatrixXd DiagonalFlow(const Eigen::VectorXd& exponents, double t) {
  return exponents.unaryExpr([t](double e) { return std::exp(e * t); })
      .asDiagonal();
}

Eigen::MatrixXd UMatrix(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size()) + 1;
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(n, n);
  u.col(n - 1).head(n - 1) = v;
  return u;
}

LineSpec LineSpec::Make(double a, double b, double s_lo, double s_hi) {
  if (!(s_lo < s_hi)) {
    throw Error(ErrorCode::kInvalidArgument, "line interval must be nonempty");
  }
  return {a, b, s_lo, s_hi};
}

Eigen::Vector2d LinePoint(const LineSpec& line, double s) {
  return {s, line.a * s + line.b};
}

TrajectoryConfig TrajectoryConfig::WithDefaultSampling(double t_max,
                                                       double renorm_step) {
  TrajectoryConfig cfg;
  cfg.t_max = t_max;
  cfg.renorm_step = renorm_step;
  const double spacing = std::min(0.02 * t_max, 0.1);
  cfg.t_samples =
      t_max > 0.0 ? static_cast<int>(std::ceil(t_max / spacing - 1e-9)) : 1;
  return cfg;
}

void TrajectoryConfig::Validate() const {
  if (!(t_max >= 0.0) || t_samples < 1 || !(renorm_step > 0.0) ||
      renorm_step > 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "need t_max >= 0, t_samples >= 1, 0 < renorm_step <= 1");
  }
}

Lattice Evolve(const Lattice& lattice, const Eigen::VectorXd& exponents,
               double t, double renorm_step) {
  if (!(renorm_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "renorm_step must be positive");
  }
  if (exponents.size() != lattice.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "flow dimension mismatch");
  }
  if (t == 0.0) return lattice;
  Eigen::MatrixXd b = lattice.scaled_basis();
  const double direction = t < 0.0 ? -1.0 : 1.0;
  double remaining = std::abs(t);
  const Eigen::MatrixXd step = DiagonalFlow(exponents, direction * renorm_step);
  while (remaining > 0.0) {
    if (remaining >= renorm_step) {
      b = step * b;
      remaining -= renorm_step;
    } else {
      b = DiagonalFlow(exponents, direction * remaining) * b;
      remaining = 0.0;
    }
    if (b.cwiseAbs().maxCoeff() > kDoubleSafeMagnitude) {
      b = ToDouble(LllReduce<Real50>(CastMatrix<Real50>(Matrix<double>(b))).basis);
    } else {
      b = LllReduce<double>(b).basis;
    }
  }
  return Lattice::FromTrustedBasis(std::move(b));
}

namespace {

double SafeLog(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace

double SystoleSeries::Min() const {
  return systole.empty() ? 0.0 : running_min.back();
}

double SystoleSeries::Max() const {
  return systole.empty() ? 0.0 : running_max.back();
}

double SystoleSeries::MaxOver(double t_lo, double t_hi) const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= t_lo - 1e-12 && t[k] <= t_hi + 1e-12) {
      m = std::max(m, systole[k]);
    }
  }
  return m;
}

double SystoleSeries::TailMax(double fraction) const {
  if (t.empty()) return 0.0;
  const double t_max = t.back();
  return MaxOver((1.0 - fraction) * t_max, t_max);
}

SystoleSeries ComputeSystoleSeries(const Lattice& start,
                                   const Eigen::VectorXd& exponents,
                                   const TrajectoryConfig& cfg) {
  cfg.Validate();
  SystoleSeries s;
  const int n = cfg.t_samples;
  s.t.reserve(n + 1);
  Lattice current = ReduceBasis(start);
  double t_prev = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = cfg.t_max * k / n;
    current = Evolve(current, exponents, t - t_prev, cfg.renorm_step);
    t_prev = t;
    const double sys = Systole(current);
    s.t.push_back(t);
    s.systole.push_back(sys);
    s.log_systole.push_back(SafeLog(sys));
    s.running_max.push_back(k == 0 ? sys : std::max(s.running_max.back(), sys));
    s.running_min.push_back(k == 0 ? sys : std::min(s.running_min.back(), sys));
  }
  return s;
}

SystoleSeries ComputeSystoleSeries(const Eigen::Vector2d& v,
                                   const WeightVector& r,
                                   const TrajectoryConfig& cfg) {
  return ComputeSystoleSeries(Lattice::FromTrustedBasis(UMatrix(v)),
                              Eigen::VectorXd(r.exponents()), cfg);
}

void WriteSystoleSeriesCsv(std::ostream& out, const SystoleSeries& series) {
  out << "t,systole,log_systole\n";
  char buf[128];
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", series.t[k],
                  series.systole[k], series.log_systole[k]);
    out << buf;
  }
}

}  // namespace dirlab
