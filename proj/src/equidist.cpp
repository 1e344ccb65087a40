#include "dirlab/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "dirlab/parallel.hpp"
#include "dirlab/reduction.hpp"
#include "dirlab/svp.hpp"

namespace dirlab {

double SiegelValue(const Lattice& lattice, double R) {
  if (!(R > 0.0 && R <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "siegel radius must be in (0, 1]");
  }
  return 2.0 * static_cast<double>(CubePoints(lattice, R).size());
}

Observable Observable::SiegelBall(double R, int dim) {
  if (!(R > 0.0 && R <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "siegel radius must be in (0, 1]");
  }
  return Observable(Kind::kSiegelBall, R, std::pow(2.0 * R, dim));
}

Observable Observable::SystoleIndicator(double eps) {
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  }
  return Observable(Kind::kSystoleIndicator, eps, std::nullopt);
}

Observable Observable::SystoleMoment(double k) {
  return Observable(Kind::kSystoleMoment, k, std::nullopt);
}

std::string Observable::name() const {
  char buf[64];
  switch (kind_) {
    case Kind::kSiegelBall:
      std::snprintf(buf, sizeof buf, "siegel_ball(%g)", parameter_);
      break;
    case Kind::kSystoleIndicator:
      std::snprintf(buf, sizeof buf, "systole_indicator(%g)", parameter_);
      break;
    case Kind::kSystoleMoment:
      std::snprintf(buf, sizeof buf, "systole_moment(%g)", parameter_);
      break;
  }
  return buf;
}

double Observable::Evaluate(const Lattice& lattice, double systole) const {
  switch (kind_) {
    case Kind::kSiegelBall:
      return systole >= parameter_ ? 0.0 : SiegelValue(lattice, parameter_);
    case Kind::kSystoleIndicator:
      return systole < parameter_ ? 1.0 : 0.0;
    case Kind::kSystoleMoment:
      return std::pow(systole, parameter_);
  }
  return 0.0;
}

CurveSpec CurveSpec::Parabola(double c) {
  CurveSpec k;
  char buf[64];
  std::snprintf(buf, sizeof buf, "parabola(%.17g)", c);
  k.name = buf;
  k.phi = [c](double s) { return Eigen::Vector2d(s, s * s + c); };
  k.dphi = [](double s) { return Eigen::Vector2d(1.0, 2.0 * s); };
  k.d2phi = [](double) { return Eigen::Vector2d(0.0, 2.0); };
  return k;
}

CurveSpec CurveSpec::Circle() {
  CurveSpec k;
  k.name = "circle";
  k.phi = [](double s) { return Eigen::Vector2d(std::cos(s), std::sin(s)); };
  k.dphi = [](double s) { return Eigen::Vector2d(-std::sin(s), std::cos(s)); };
  k.d2phi = [](double s) {
    return Eigen::Vector2d(-std::cos(s), -std::sin(s));
  };
  return k;
}

CurveSpec CurveSpec::Line(double slope) {
  CurveSpec k;
  char buf[64];
  std::snprintf(buf, sizeof buf, "line(%.17g)", slope);
  k.name = buf;
  k.phi = [slope](double s) { return Eigen::Vector2d(s, slope * s); };
  k.dphi = [slope](double) { return Eigen::Vector2d(1.0, slope); };
  k.d2phi = [](double) { return Eigen::Vector2d(0.0, 0.0); };
  return k;
}

namespace {

// Value of the `order`-th derivative of the polynomial at s.
double PolyDerivative(const std::vector<double>& c, int order, double s) {
  double value = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= order; --k) {
    double factor = 1.0;
    for (int m = 0; m < order; ++m) factor *= k - m;
    value = value * s + factor * c[k];
  }
  return value;
}

}  // namespace

CurveSpec CurveSpec::Polynomial(const std::vector<double>& x,
                                const std::vector<double>& y) {
  if (x.empty() || y.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty polynomial");
  }
  CurveSpec k;
  k.name = "polynomial";
  k.phi = [x, y](double s) {
    return Eigen::Vector2d(PolyDerivative(x, 0, s), PolyDerivative(y, 0, s));
  };
  k.dphi = [x, y](double s) {
    return Eigen::Vector2d(PolyDerivative(x, 1, s), PolyDerivative(y, 1, s));
  };
  k.d2phi = [x, y](double s) {
    return Eigen::Vector2d(PolyDerivative(x, 2, s), PolyDerivative(y, 2, s));
  };
  return k;
}

double Wronskian(const CurveSpec& curve, double s) {
  const Eigen::Vector2d d1 = curve.dphi(s);
  const Eigen::Vector2d d2 = curve.d2phi(s);
  return d1(0) * d2(1) - d1(1) * d2(0);
}

Eigen::Matrix2d CurveFrameBlock(const CurveSpec& curve, double s) {
  const Eigen::Vector2d d1 = curve.dphi(s);
  if (!(std::abs(d1(0)) >= kFrameSingularTol)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "phi1'(%.17g) vanishes", s);
    throw Error(ErrorCode::kFrameSingular, buf);
  }
  Eigen::Matrix2d m;
  m << 1.0 / d1(0), 0.0, -d1(1), d1(0);
  return m;
}

Eigen::Matrix3d CurveFrame(const CurveSpec& curve, double s) {
  Eigen::Matrix3d z = Eigen::Matrix3d::Identity();
  z.topLeftCorner<2, 2>() = CurveFrameBlock(curve, s);
  return z;
}

void CheckNondegenerate(const CurveSpec& curve) {
  for (int j = 0; j < kNondegeneracyGrid; ++j) {
    const double s =
        curve.s_lo + (curve.s_hi - curve.s_lo) * j / (kNondegeneracyGrid - 1);
    if (!(std::abs(Wronskian(curve, s)) >= kNondegeneracyTol)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "Wronskian of %s vanishes at s=%.17g",
                    curve.name.c_str(), s);
      throw Error(ErrorCode::kNondegeneracy, buf);
    }
  }
}

void ExperimentConfig::Validate() const {
  if (!(T >= 0.0) || s_samples < 1 || t_samples < 1 ||
      !(s_offset >= 0.0 && s_offset < 1.0) || !(renorm_step > 0.0) ||
      renorm_step > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid experiment config");
  }
}

namespace {

// Per-s results; everything downstream is a fixed-order reduction of these.
struct Row {
  double weight = 0.0;
  std::vector<double> window_sum;  // sums over t-samples in each window
  double coarse_sum = 0.0;         // even t-indices
  std::array<double, 3> escaped{};
  std::vector<double> systole;
  double max_value = 0.0;
};

int WindowOf(int k, int t_samples) {
  return static_cast<int>(static_cast<long>(k) * kPartialWindows / t_samples);
}

Row ComputeRow(const Lattice& start, const Eigen::VectorXd& exponents,
               const Observable& obs, const ExperimentConfig& cfg) {
  Row row;
  row.window_sum.assign(kPartialWindows, 0.0);
  row.systole.resize(cfg.t_samples);
  Lattice current = ReduceBasis(start);
  double t_prev = 0.0;
  for (int k = 0; k < cfg.t_samples; ++k) {
    const double t = cfg.T * k / cfg.t_samples;
    current = Evolve(current, exponents, t - t_prev, cfg.renorm_step);
    t_prev = t;
    const double sys = Systole(current);
    const double value = obs.Evaluate(current, sys);
    row.window_sum[WindowOf(k, cfg.t_samples)] += value;
    if (k % 2 == 0) row.coarse_sum += value;
    for (std::size_t e = 0; e < kEscapeThresholds.size(); ++e) {
      if (sys < kEscapeThresholds[e]) row.escaped[e] += 1.0;
    }
    row.systole[k] = sys;
    row.max_value = std::max(row.max_value, value);
  }
  return row;
}

double WeightedSum(const std::vector<Row>& rows,
                   const std::function<double(const Row&)>& f) {
  std::vector<double> terms(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) terms[j] = rows[j].weight * f(rows[j]);
  return PairwiseSum(terms);
}

}  // namespace

EquidistReport RunEquidist(const FiberFunction& fiber, double s_lo,
                           double s_hi, const ScalarFunction& density,
                           const WeightVector& r, const Observable& obs,
                           const ExperimentConfig& cfg) {
  cfg.Validate();
  if (!(s_lo < s_hi)) {
    throw Error(ErrorCode::kInvalidArgument, "s interval must be nonempty");
  }
  const int ns = cfg.s_samples;
  const int nt = cfg.t_samples;
  const double h = (s_hi - s_lo) / ns;
  std::vector<double> s_grid(ns), weights(ns);
  for (int j = 0; j < ns; ++j) {
    s_grid[j] = s_lo + (j + cfg.s_offset) * h;
    weights[j] = density(s_grid[j]);
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) {
      throw Error(ErrorCode::kInvalidArgument, "density must be nonnegative");
    }
  }
  const double total = PairwiseSum(weights);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "density vanishes on the grid");
  }

  const Eigen::VectorXd exponents = r.exponents();
  std::vector<Row> rows(ns);
  ParallelFor(ns, ResolveThreadCount(cfg.threads), [&](int j) {
    rows[j] = ComputeRow(fiber(s_grid[j]), exponents, obs, cfg);
    rows[j].weight = weights[j] / total;
  });

  EquidistReport rep;
  rep.observable = obs.name();
  rep.T = cfg.T;
  rep.s_samples = ns;
  rep.t_samples = nt;

  // Partial averages over t < T m / 10.
  int counted = 0;
  double cumulative = 0.0;
  for (int m = 0; m < kPartialWindows; ++m) {
    const double window = WeightedSum(rows, [m](const Row& w) {
      return w.window_sum[m];
    });
    cumulative += window;
    for (int k = 0; k < nt; ++k) {
      if (WindowOf(k, nt) == m) ++counted;
    }
    rep.partial_T.push_back(cfg.T * (m + 1) / kPartialWindows);
    rep.partial_average.push_back(counted > 0 ? cumulative / counted : 0.0);
  }
  rep.average = rep.partial_average.back();

  for (std::size_t e = 0; e < kEscapeThresholds.size(); ++e) {
    rep.escape_fraction[e] =
        WeightedSum(rows, [e](const Row& w) { return w.escaped[e]; }) / nt;
  }

  double diag = std::numeric_limits<double>::infinity();
  for (int k = 0; k < nt; ++k) {
    double best = 0.0;
    for (const Row& w : rows) best = std::max(best, w.systole[k]);
    diag = std::min(diag, best);
  }
  rep.hypothesis_diagnostic = diag;

  double max_value = 0.0;
  for (const Row& w : rows) max_value = std::max(max_value, w.max_value);
  rep.max_value = max_value;

  // Coarse grid: even s and even t indices.
  std::vector<double> coarse_terms, coarse_weights;
  for (int j = 0; j < ns; j += 2) {
    coarse_terms.push_back(rows[j].weight * rows[j].coarse_sum);
    coarse_weights.push_back(rows[j].weight);
  }
  const int coarse_t = (nt + 1) / 2;
  const double coarse_weight = PairwiseSum(coarse_weights);
  double coarse = rep.average;
  if (coarse_weight > 0.0) {
    coarse = PairwiseSum(coarse_terms) / (coarse_weight * coarse_t);
  }
  std::vector<double> deviations(ns);
  for (int j = 0; j < ns; ++j) {
    double row_avg = 0.0;
    for (double v : rows[j].window_sum) row_avg += v;
    row_avg /= nt;
    deviations[j] = rows[j].weight * (row_avg - rep.average) * (row_avg - rep.average);
  }
  double sum_w2 = 0.0;
  for (const Row& w : rows) sum_w2 += w.weight * w.weight;
  const double std_error = std::sqrt(PairwiseSum(deviations) * sum_w2);
  rep.quadrature_error =
      std::max(2.0 * std::abs(rep.average - coarse), 3.0 * std_error);

  if (obs.haar_value()) {
    rep.target = obs.haar_value();
    rep.rel_error = std::abs(rep.average - *rep.target) / *rep.target;
  }
  return rep;
}

EquidistReport LineEquidistExperiment(const LineSpec& line, const Lattice& x0,
                                      const ScalarFunction& density,
                                      const WeightVector& r,
                                      const Observable& obs,
                                      const ExperimentConfig& cfg) {
  if (x0.dim() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "line experiments live in X_3");
  }
  const Eigen::MatrixXd base = x0.basis();
  return RunEquidist(
      [&](double s) {
        return Lattice::FromTrustedBasis(
            Eigen::MatrixXd(UMatrix(LinePoint(line, s)) * base));
      },
      line.s_lo, line.s_hi, density, r, obs, cfg);
}

EquidistReport CurveEquidistExperiment(const CurveSpec& curve,
                                       const WeightVector& r,
                                       const Observable& obs,
                                       const ExperimentConfig& cfg) {
  CheckNondegenerate(curve);
  EquidistReport rep = RunEquidist(
      [&](double s) {
        return Lattice::FromTrustedBasis(Eigen::MatrixXd(UMatrix(curve.phi(s))));
      },
      curve.s_lo, curve.s_hi, curve.density, r, obs, cfg);
  if (r.r1 == 0.5 && r.r2 == 0.5) {
    const EquidistReport twisted = RunEquidist(
        [&](double s) {
          return Lattice::FromTrustedBasis(Eigen::MatrixXd(
              CurveFrame(curve, s) * UMatrix(curve.phi(s))));
        },
        curve.s_lo, curve.s_hi, curve.density, r, obs, cfg);
    rep.twisted_average = twisted.average;
  }
  return rep;
}

nlohmann::json ToJson(const EquidistReport& rep) {
  nlohmann::json j;
  j["observable"] = rep.observable;
  j["T"] = rep.T;
  j["s_samples"] = rep.s_samples;
  j["t_samples"] = rep.t_samples;
  j["partial_T"] = rep.partial_T;
  j["partial_average"] = rep.partial_average;
  j["average"] = rep.average;
  j["target"] = rep.target ? nlohmann::json(*rep.target) : nlohmann::json();
  j["rel_error"] =
      rep.rel_error ? nlohmann::json(*rep.rel_error) : nlohmann::json();
  nlohmann::json escape = nlohmann::json::object();
  for (std::size_t e = 0; e < kEscapeThresholds.size(); ++e) {
    char key[16];
    std::snprintf(key, sizeof key, "%g", kEscapeThresholds[e]);
    escape[key] = rep.escape_fraction[e];
  }
  j["escape_profile"] = escape;
  j["hypothesis_diagnostic"] = rep.hypothesis_diagnostic;
  j["quadrature_error"] = rep.quadrature_error;
  j["max_value"] = rep.max_value;
  if (rep.twisted_average) j["twisted_average"] = *rep.twisted_average;
  return j;
}

void WritePartialAveragesCsv(std::ostream& out, const EquidistReport& rep) {
  out << "T_partial,average,target,rel_error\n";
  char buf[160];
  for (std::size_t m = 0; m < rep.partial_T.size(); ++m) {
    const double avg = rep.partial_average[m];
    if (rep.target) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n",
                    rep.partial_T[m], avg, *rep.target,
                    std::abs(avg - *rep.target) / *rep.target);
    } else {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,,\n", rep.partial_T[m], avg);
    }
    out << buf;
  }
}

}  // namespace dirlab
