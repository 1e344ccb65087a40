#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dirlab/flows.hpp"

namespace dirlab {

/// 2 * (number of sign classes of nonzero points with sup-norm < R).
double SiegelValue(const Lattice& lattice, double R);

class Observable {
 public:
  enum class Kind { kSiegelBall, kSystoleIndicator, kSystoleMoment };

  /// Requires 0 < R <= 1; Haar value (2R)^dim.
  static Observable SiegelBall(double R, int dim = 3);
  /// 1 if systole < eps, else 0.
  static Observable SystoleIndicator(double eps);
  /// systole^k.
  static Observable SystoleMoment(double k);

  Kind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  const std::optional<double>& haar_value() const { return haar_value_; }
  std::string name() const;

  /// `systole` must be the systole of `lattice`.
  double Evaluate(const Lattice& lattice, double systole) const;

 private:
  Observable(Kind kind, double parameter, std::optional<double> haar)
      : kind_(kind), parameter_(parameter), haar_value_(haar) {}

  Kind kind_;
  double parameter_;
  std::optional<double> haar_value_;
};

using ScalarFunction = std::function<double(double)>;
using CurveFunction = std::function<Eigen::Vector2d(double)>;

inline double UniformDensity(double) { return 1.0; }

/// A C^2 planar curve with its first two derivatives and a density for nu.
struct CurveSpec {
  std::string name;
  CurveFunction phi;
  CurveFunction dphi;
  CurveFunction d2phi;
  ScalarFunction density = UniformDensity;
  double s_lo = 0.0;
  double s_hi = 1.0;

  /// (s, s^2 + c).
  static CurveSpec Parabola(double c = 0.0);
  /// (cos s, sin s).
  static CurveSpec Circle();
  /// (s, slope s); Wronskian identically 0.
  static CurveSpec Line(double slope = 3.0);
  /// (sum x_k s^k, sum y_k s^k), coefficients in increasing degree.
  static CurveSpec Polynomial(const std::vector<double>& x,
                              const std::vector<double>& y);
};

/// det[phi'(s), phi''(s)].
double Wronskian(const CurveSpec& curve, double s);

/// M(s) = [[1/phi1', 0], [-phi2', phi1']]: det M = 1 and M phi' = e1.
Eigen::Matrix2d CurveFrameBlock(const CurveSpec& curve, double s);

/// z(s) = diag(M(s), 1).
Eigen::Matrix3d CurveFrame(const CurveSpec& curve, double s);

inline constexpr double kFrameSingularTol = 1e-9;
inline constexpr double kNondegeneracyTol = 1e-9;
inline constexpr int kNondegeneracyGrid = 101;

/// Throws Nondegeneracy naming the first grid point where |W(s)| is below
/// kNondegeneracyTol.
void CheckNondegenerate(const CurveSpec& curve);

/// Fractional offset of s_j = s_lo + (j + offset) h within each cell.
inline constexpr double kGridOffset = 0.2599210498948732;

struct ExperimentConfig {
  double T = 25.0;
  int s_samples = 200;
  int t_samples = 2500;
  double s_offset = kGridOffset;
  double renorm_step = kDefaultRenormStep;
  /// 0 defers to $DIRLAB_THREADS, then 1.
  int threads = 0;

  void Validate() const;
};

inline constexpr std::array<double, 3> kEscapeThresholds = {0.01, 0.05, 0.1};
inline constexpr int kPartialWindows = 10;

struct EquidistReport {
  std::string observable;
  double T = 0.0;
  int s_samples = 0;
  int t_samples = 0;
  /// T m / 10 for m = 1..10 and the running averages over t < T m / 10.
  std::vector<double> partial_T;
  std::vector<double> partial_average;
  double average = 0.0;
  std::optional<double> target;
  std::optional<double> rel_error;
  /// nu-weighted fraction of samples with systole < kEscapeThresholds[i].
  std::array<double, 3> escape_fraction{};
  /// min over t of max over s of the systole.
  double hypothesis_diagnostic = 0.0;
  /// max(2 |average - coarse average|, 3 standard errors over s).
  double quadrature_error = 0.0;
  double max_value = 0.0;
  /// Average over f_t z(s) u(phi(s)) Z^3 (curve runs with r = (1/2, 1/2)).
  std::optional<double> twisted_average;
};

nlohmann::json ToJson(const EquidistReport& report);

/// Header `T_partial,average,target,rel_error`.
void WritePartialAveragesCsv(std::ostream& out, const EquidistReport& report);

/// Starting lattice for grid point s.
using FiberFunction = std::function<Lattice(double)>;

/// Double average of obs over f_t fiber(s) with s on the offset grid of
/// [s_lo, s_hi] weighted by density, and t_k = k T / t_samples,
/// k = 0..t_samples-1.
EquidistReport RunEquidist(const FiberFunction& fiber, double s_lo,
                           double s_hi, const ScalarFunction& density,
                           const WeightVector& r, const Observable& obs,
                           const ExperimentConfig& cfg);

/// Fibers u(s, a s + b) x0.
EquidistReport LineEquidistExperiment(const LineSpec& line, const Lattice& x0,
                                      const ScalarFunction& density,
                                      const WeightVector& r,
                                      const Observable& obs,
                                      const ExperimentConfig& cfg);

/// Fibers u(phi(s)) Z^3; checks nondegeneracy first.
EquidistReport CurveEquidistExperiment(const CurveSpec& curve,
                                       const WeightVector& r,
                                       const Observable& obs,
                                       const ExperimentConfig& cfg);

}  // namespace dirlab
