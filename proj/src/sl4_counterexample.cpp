#include "dirlab/sl4_counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "dirlab/flows.hpp"
#include "dirlab/parallel.hpp"
#include "dirlab/svp.hpp"

namespace dirlab {

namespace {

Eigen::Matrix4d E(int i, int j) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(i, j) = 1.0;
  return m;
}

Eigen::Matrix4d U4(const Eigen::Vector3d& v) {
  Eigen::Matrix4d u = Eigen::Matrix4d::Identity();
  u.block<3, 1>(0, 3) = v;
  return u;
}

Eigen::Matrix4d Us(double s) { return Eigen::Matrix4d::Identity() + s * E(2, 3); }

nlohmann::json MatrixJson(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

PElement PElement::Make(const Eigen::Matrix4d& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "P element must be finite");
  }
  for (int i = 0; i < 3; ++i) {
    if (m(i, 3) != 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "P element needs zero entries (1,4), (2,4), (3,4)");
    }
  }
  if (std::abs(m.determinant() - 1.0) > kPElementTol) {
    throw Error(ErrorCode::kDeterminantMismatch, "P element needs det 1");
  }
  return PElement(m);
}

PElement PElement::Example(double x, double y, double z) {
  Eigen::Matrix4d m;
  m << 1, 0, 1, 0,
       0, 1, 1, 0,
       0, 0, 1, 0,
       x, y, z, 1;
  return PElement(m);
}

Eigen::Matrix4d QElement::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<3, 3>() = a;
  m(3, 3) = d;
  return m;
}

QElement QProjection(const PElement& p) {
  return {p.block(), p.p44()};
}

Eigen::Matrix4d ConjugateByFlow(const PElement& p,
                                const Eigen::Vector4d& e, double t) {
  const Eigen::Vector4d f = (e * t).array().exp();
  const Eigen::Vector4d g = (-e * t).array().exp();
  return f.asDiagonal() * p.matrix() * g.asDiagonal();
}

Factorization SolveFactorization(const PElement& p, double s) {
  const Eigen::Matrix4d m = Us(s) * p.matrix();
  const Eigen::Matrix3d n = m.topLeftCorner<3, 3>();
  if (!(std::abs(n.determinant()) >= kFactorizationSingularTol)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "top-left minor of u_s p vanishes at s=%.17g",
                  s);
    throw Error(ErrorCode::kFactorizationSingular, buf);
  }
  const Eigen::Vector3d u_tilde = n.partialPivLu().solve(m.block<3, 1>(0, 3));
  // m u(-u_tilde) = p(s)^{-1} has zero (i,4) entries for i <= 3.
  Eigen::Matrix4d p_inv = m * U4(-u_tilde);
  p_inv.block<3, 1>(0, 3).setZero();
  Eigen::Matrix4d p_s = p_inv.inverse();
  p_s.block<3, 1>(0, 3).setZero();
  const double residual =
      (m - p_s.inverse() * U4(u_tilde)).cwiseAbs().maxCoeff();
  return {PElement::Make(p_s), u_tilde, residual};
}

Eigen::Matrix4d QOfS(const PElement& p, double s) {
  const Eigen::Matrix3d n = (Us(s) * p.matrix()).topLeftCorner<3, 3>();
  if (!(std::abs(n.determinant()) >= kFactorizationSingularTol)) {
    throw Error(ErrorCode::kFactorizationSingular,
                "top-left minor of u_s p vanishes");
  }
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q.topLeftCorner<3, 3>() = n.inverse();
  q(3, 3) = n.determinant();
  return q;
}

SegmentParameters ComputeSegmentParameters(const PElement& p) {
  const Eigen::Matrix3d b = p.block();
  if (!(std::abs(b.determinant()) >= kFactorizationSingularTol)) {
    throw Error(ErrorCode::kDegenerateSegment, "upper block of p is singular");
  }
  const Eigen::Vector3d col = b.partialPivLu().solve(Eigen::Vector3d::UnitZ());
  SegmentParameters sp;
  sp.w = p.p44() * col;
  sp.c = p.bottom().dot(col);
  if (!(sp.w.cwiseAbs().maxCoeff() > 0.0)) {
    throw Error(ErrorCode::kDegenerateSegment, "w vanishes");
  }
  // |1 + c s| >= floor on [-s*, s*].
  const double reach = std::abs(sp.c) * kMaxHalfWidth;
  sp.s_star = reach <= 1.0 - kDenominatorFloor
                  ? kMaxHalfWidth
                  : (1.0 - kDenominatorFloor) / std::abs(sp.c);
  return sp;
}

Eigen::Matrix4d LogDerivativeFiniteDifference(const PElement& p, double h) {
  return (QOfS(p, h) - QOfS(p, -h)) / (2.0 * h) * QOfS(p, 0.0).inverse();
}

Eigen::Matrix4d LogDerivativeClosedForm(const PElement& p) {
  const Eigen::Vector3d col =
      p.block().partialPivLu().solve(Eigen::Vector3d::UnitZ());
  Eigen::Matrix4d x = Eigen::Matrix4d::Zero();
  x.topLeftCorner<3, 3>() = -col * p.bottom().transpose();
  x(3, 3) = p.bottom().dot(col);
  return x;
}

std::vector<Eigen::Matrix4d> HBasis() {
  return {E(0, 1), E(1, 0), E(2, 3), E(3, 2),
          E(0, 0) - E(3, 3), E(1, 1) - E(3, 3), E(2, 2) - E(3, 3)};
}

std::vector<Eigen::Matrix4d> UPlusBasis(const Permutation& sigma) {
  if (sigma.size() != 4) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must permute 4 letters");
  }
  std::vector<Eigen::Matrix4d> out;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) out.push_back(E(sigma[a], sigma[b]));
  }
  return out;
}

std::vector<Eigen::Matrix4d> AdjointHBasis(const PElement& p,
                                           AdConvention convention) {
  const Eigen::Matrix4d a = convention == AdConvention::kDisplayed
                                ? QProjection(p).matrix()
                                : QOfS(p, 0.0);
  const Eigen::Matrix4d a_inv = a.inverse();
  std::vector<Eigen::Matrix4d> out;
  for (const auto& h : HBasis()) out.push_back(a * h * a_inv);
  return out;
}

namespace {

// Relative singular values of the column-normalized matrix.
Eigen::VectorXd RelativeSingularValues(const Eigen::MatrixXd& cols) {
  Eigen::MatrixXd m = cols;
  for (int j = 0; j < m.cols(); ++j) m.col(j).normalize();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  Eigen::VectorXd sv = svd.singularValues();
  return sv / sv(0);
}

int RankOf(const Eigen::VectorXd& rel) {
  for (int i = 0; i < rel.size(); ++i) {
    if (rel(i) >= kRankThreshold * 10.0) continue;
    if (rel(i) > kRankThreshold / 10.0) {
      throw Error(ErrorCode::kRankTestUnstable,
                  "singular value within a factor 10 of the rank threshold");
    }
    return i;
  }
  return static_cast<int>(rel.size());
}

Eigen::VectorXd Flatten(const Eigen::Matrix4d& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), 16);
}

}  // namespace

MembershipResult RelationMembershipTest(const PElement& p,
                                        const Permutation& sigma,
                                        AdConvention convention) {
  const Eigen::Matrix4d fd = LogDerivativeFiniteDifference(p);
  const Eigen::Matrix4d closed = LogDerivativeClosedForm(p);
  const double scale = std::max(1.0, closed.cwiseAbs().maxCoeff());
  if ((fd - closed).cwiseAbs().maxCoeff() > kClosedFormTol * scale) {
    throw Error(ErrorCode::kRankTestUnstable,
                "finite-difference derivative disagrees with closed form");
  }

  std::vector<Eigen::Matrix4d> gens = AdjointHBasis(p, convention);
  for (const auto& u : UPlusBasis(sigma)) gens.push_back(u);
  Eigen::MatrixXd span(16, gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j) span.col(j) = Flatten(gens[j]);

  MembershipResult res;
  res.span_rank = RankOf(RelativeSingularValues(span));
  const Eigen::VectorXd x = Flatten(closed);
  if (x.norm() < 1e-12) return res;

  Eigen::MatrixXd aug(16, span.cols() + 1);
  aug << span, x;
  const int aug_rank = RankOf(RelativeSingularValues(aug));
  res.outside = aug_rank > res.span_rank;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(span, Eigen::ComputeThinU);
  const Eigen::MatrixXd basis = svd.matrixU().leftCols(res.span_rank);
  res.residual = (x - basis * (basis.transpose() * x)).norm() / x.norm();
  return res;
}

bool IsAdmissible(const PElement& p, AdConvention convention) {
  for (const auto& sigma : AllPermutations(4)) {
    if (!RelationMembershipTest(p, sigma, convention).outside) return false;
  }
  return true;
}

std::array<int, 3> FindAdmissibleXyz(std::uint64_t seed) {
  std::vector<std::array<int, 3>> box;
  for (int x = -3; x <= 3; ++x) {
    for (int y = -3; y <= 3; ++y) {
      for (int z = -3; z <= 3; ++z) box.push_back({x, y, z});
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = box.size() - 1; i > 0; --i) {
    std::swap(box[i], box[rng() % (i + 1)]);
  }
  for (const auto& xyz : box) {
    try {
      if (IsAdmissible(PElement::Example(xyz[0], xyz[1], xyz[2]))) return xyz;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRankTestUnstable) throw;
    }
  }
  throw Error(ErrorCode::kSearchExhausted, "no admissible (x, y, z) in box");
}

Lattice QuarticBaseLattice() {
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  const double r6 = std::sqrt(6.0);
  Eigen::Matrix4d m;
  const int signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (int i = 0; i < 4; ++i) {
    const double a = signs[i][0] * r2;
    const double b = signs[i][1] * r3;
    const double c = signs[i][0] * signs[i][1] * r6;
    m.row(i) << 1.0, a, b, (a + c) / 2.0;
  }
  if (m.determinant() < 0.0) m.col(0) = -m.col(0);
  return MakeLattice(Eigen::MatrixXd(m), Normalize::kAlways);
}

double DiagonalOrbitMinSystole(const Lattice& x, double t_max, double t_step) {
  if (x.dim() != 4) {
    throw Error(ErrorCode::kInvalidArgument, "expected a lattice in X_4");
  }
  double best = Systole(x);
  const int steps = static_cast<int>(std::ceil(t_max / t_step - 1e-9));
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int k = -1; k <= 1; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        Eigen::Vector4d d(i, j, k, -(i + j + k));
        d /= d.norm();
        for (int n = 1; n <= steps; ++n) {
          const double t = std::min(t_max, n * t_step);
          const Eigen::Vector4d f = (d * t).array().exp();
          const Lattice y = Lattice::FromTrustedBasis(
              Eigen::MatrixXd(f.asDiagonal() * x.basis()));
          best = std::min(best, Systole(y));
        }
      }
    }
  }
  return best;
}

Eigen::Vector3d SegmentConstruction::LinePoint(double s) const {
  return v0 + params.Tau(s) * params.w;
}

SegmentConstruction BuildSegmentConstruction(const std::array<int, 3>& xyz,
                                             const Eigen::Vector3d& v_target,
                                             std::int64_t denominator) {
  if (denominator < 1) {
    throw Error(ErrorCode::kInvalidArgument, "denominator must be >= 1");
  }
  SegmentConstruction c;
  c.xyz = xyz;
  c.gamma_denominator = denominator;
  const Eigen::Matrix4d g0 = QuarticBaseLattice().basis();
  const Eigen::Matrix4d target =
      PElement::Example(xyz[0], xyz[1], xyz[2]).matrix() * U4(v_target);
  const Eigen::Matrix4d ideal = g0.inverse() * target;

  Eigen::Matrix<std::int64_t, 4, 4> num;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      num(i, j) = static_cast<std::int64_t>(
          std::llround(ideal(i, j) * static_cast<double>(denominator)));
    }
  }
  const __int128 det_num = IntegerDeterminant(IntMatrix(num));
  if (det_num <= 0) {
    throw Error(ErrorCode::kFactorizationSingular,
                "rational approximation has nonpositive determinant");
  }
  const double d = static_cast<double>(denominator);
  c.gamma = num.cast<double>() / d;
  // det(num / D) = det_num / D^4; rescale the first column to det 1.
  c.gamma.col(0) *= d * d * d * d / static_cast<double>(det_num);

  const Eigen::Matrix4d g = g0 * c.gamma;
  const Eigen::Matrix3d b = g.topLeftCorner<3, 3>();
  c.v0 = b.partialPivLu().solve(Eigen::Vector3d(g.block<3, 1>(0, 3)));
  Eigen::Matrix4d p = g * U4(-c.v0);
  p.block<3, 1>(0, 3).setZero();
  c.p = PElement::Make(p);
  c.base_point = Lattice::FromTrustedBasis(Eigen::MatrixXd(g));
  c.params = ComputeSegmentParameters(c.p);
  c.admissible = IsAdmissible(c.p);
  return c;
}

nlohmann::json ToJson(const SegmentConstruction& c) {
  nlohmann::json j;
  j["xyz"] = c.xyz;
  j["p"] = MatrixJson(c.p.matrix());
  j["gamma"] = MatrixJson(c.gamma);
  j["gamma_denominator"] = c.gamma_denominator;
  j["base_point"] = MatrixJson(c.base_point.basis());
  j["v0"] = {c.v0(0), c.v0(1), c.v0(2)};
  j["w"] = {c.params.w(0), c.params.w(1), c.params.w(2)};
  j["tau"] = {{"numerator", c.params.tau_numerator()},
              {"denominator", c.params.tau_denominator()}};
  j["interval"] = {-c.params.s_star, c.params.s_star};
  j["admissible"] = c.admissible;
  return j;
}

std::vector<SegmentVerdict> VerifySegment(const SegmentConstruction& c,
                                          const std::vector<double>& s_grid,
                                          double T, int threads) {
  if (!(T > 0.0)) throw Error(ErrorCode::kInvalidArgument, "T must be > 0");
  for (double s : s_grid) {
    if (!(std::abs(s) <= c.params.s_star)) {
      throw Error(ErrorCode::kInvalidArgument, "s outside the segment interval");
    }
  }
  const Eigen::VectorXd exponents =
      (Eigen::VectorXd(4) << 1.0 / 3, 1.0 / 3, 1.0 / 3, -1.0).finished();
  const TrajectoryConfig cfg = TrajectoryConfig::WithDefaultSampling(T);
  std::vector<SegmentVerdict> out(s_grid.size());
  ParallelFor(static_cast<int>(s_grid.size()), ResolveThreadCount(threads),
              [&](int i) {
                const double s = s_grid[i];
                const Lattice start = Lattice::FromTrustedBasis(
                    UMatrix(Eigen::VectorXd(c.LinePoint(s))));
                const SystoleSeries series =
                    ComputeSystoleSeries(start, exponents, cfg);
                SegmentVerdict& v = out[i];
                v.s = s;
                v.min_systole = series.Min();
                v.max_systole = series.Max();
                v.max_tail_systole = series.MaxOver(T / 2, T);
                v.improvement_evidence =
                    v.max_tail_systole <= 1.0 - kSegmentK1Margin;
              });
  return out;
}

void WriteVerdictCsv(std::ostream& out,
                     const std::vector<SegmentVerdict>& verdicts) {
  out << "s,min_systole,max_tail_systole,verdict\n";
  char buf[160];
  for (const auto& v : verdicts) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%s\n", v.s,
                  v.min_systole, v.max_tail_systole,
                  v.improvement_evidence ? "improvement evidence"
                                         : "no improvement evidence");
    out << buf;
  }
}

}  // namespace dirlab
