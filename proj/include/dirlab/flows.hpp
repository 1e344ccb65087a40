#pragma once

#include <iosfwd>
#include <vector>

#include "dirlab/lattice.hpp"

namespace dirlab {

/// Weights (r1, r2): positive, summing to 1.
struct WeightVector {
  double r1 = 0.5;
  double r2 = 0.5;

  static WeightVector Make(double r1, double r2);
  static WeightVector Unweighted() { return {0.5, 0.5}; }

  double min() const { return r1 < r2 ? r1 : r2; }
  /// Exponents (r1, r2, -1) of the flow.
  Eigen::Vector3d exponents() const { return {r1, r2, -1.0}; }
};

/// diag(e^{r1 t}, e^{r2 t}, e^{-t}).
Eigen::Matrix3d FlowMatrix(const WeightVector& r, double t);

/// diag(e^{exponents_i t}); exponents are expected to sum to 0.
Eigen::MatrixXd DiagonalFlow(const Eigen::VectorXd& exponents, double t);

/// Upper unitriangular matrix whose last column is (v, 1) and which is the
/// identity elsewhere. Dimension v.size() + 1.
Eigen::MatrixXd UMatrix(const Eigen::VectorXd& v);

inline Eigen::Matrix3d UMatrix(const Eigen::Vector2d& v) {
  return UMatrix(Eigen::VectorXd(v));
}

/// The affine line s -> (s, a s + b) restricted to [s_lo, s_hi].
struct LineSpec {
  double a = 0.0;
  double b = 0.0;
  double s_lo = 0.0;
  double s_hi = 1.0;

  static LineSpec Make(double a, double b, double s_lo, double s_hi);
};

Eigen::Vector2d LinePoint(const LineSpec& line, double s);

struct TrajectoryConfig {
  double t_max = 0.0;
  int t_samples = 1;
  double renorm_step = 0.5;

  /// Sample spacing at most min(0.02 t_max, 0.1).
  static TrajectoryConfig WithDefaultSampling(double t_max,
                                              double renorm_step = 0.5);
  void Validate() const;
};

inline constexpr double kDefaultRenormStep = 0.5;

/// diag(e^{exponents t}) applied to the lattice in steps of at most
/// `renorm_step`, reducing the basis after each step.
Lattice Evolve(const Lattice& lattice, const Eigen::VectorXd& exponents,
               double t, double renorm_step = kDefaultRenormStep);

inline Lattice Evolve(const Lattice& lattice, const WeightVector& r, double t,
                      double renorm_step = kDefaultRenormStep) {
  return Evolve(lattice, Eigen::VectorXd(r.exponents()), t, renorm_step);
}

/// Systole along t -> f_t x sampled at t_k = k t_max / t_samples,
/// k = 0..t_samples.
struct SystoleSeries {
  std::vector<double> t;
  std::vector<double> systole;
  std::vector<double> log_systole;
  std::vector<double> running_max;
  std::vector<double> running_min;

  std::size_t size() const { return t.size(); }
  double Min() const;
  double Max() const;
  /// Maximum over samples with t_lo <= t <= t_hi.
  double MaxOver(double t_lo, double t_hi) const;
  /// Maximum over the last `fraction` of the time horizon.
  double TailMax(double fraction = 0.2) const;
};

/// Series for an arbitrary start lattice under diag(e^{exponents t}).
SystoleSeries ComputeSystoleSeries(const Lattice& start,
                                   const Eigen::VectorXd& exponents,
                                   const TrajectoryConfig& cfg);

/// Series for f_t^(r) u(v) Z^3.
SystoleSeries ComputeSystoleSeries(const Eigen::Vector2d& v,
                                   const WeightVector& r,
                                   const TrajectoryConfig& cfg);

/// Header `t,systole,log_systole`, 12 significant digits.
void WriteSystoleSeriesCsv(std::ostream& out, const SystoleSeries& series);

}  // namespace dirlab
