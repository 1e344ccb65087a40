#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dirlab/hajos.hpp"
#include "dirlab/lattice.hpp"

namespace dirlab {

/// Element of SL_4 whose entries (1,4), (2,4), (3,4) vanish.
class PElement {
 public:
  static PElement Make(const Eigen::Matrix4d& m);
  /// Upper block [[1,0,1],[0,1,1],[0,0,1]], bottom row (x, y, z, 1).
  static PElement Example(double x, double y, double z);

  const Eigen::Matrix4d& matrix() const { return m_; }
  Eigen::Matrix3d block() const { return m_.topLeftCorner<3, 3>(); }
  /// (p41, p42, p43).
  Eigen::Vector3d bottom() const { return m_.block<1, 3>(3, 0).transpose(); }
  double p44() const { return m_(3, 3); }

 private:
  explicit PElement(const Eigen::Matrix4d& m) : m_(m) {}
  Eigen::Matrix4d m_;
};

/// diag(A, d) with det(A) d = 1.
struct QElement {
  Eigen::Matrix3d a;
  double d = 1.0;

  Eigen::Matrix4d matrix() const;
};

/// Zeroes entries (4,1), (4,2), (4,3).
QElement QProjection(const PElement& p);

/// Exponents of the Dirichlet flow diag(e^{t/3}, e^{t/3}, e^{t/3}, e^{-t}).
inline Eigen::Vector4d DirichletExponents4() {
  return {1.0 / 3, 1.0 / 3, 1.0 / 3, -1.0};
}
/// Exponents of diag(e^{3t}, e^t, e^{-t}, e^{-3t}).
inline Eigen::Vector4d AuxiliaryExponents4() { return {3.0, 1.0, -1.0, -3.0}; }

/// f_t p f_{-t} for f_t = diag(e^{exponents t}). Under the Dirichlet flow this
/// tends to q_projection(p).
Eigen::Matrix4d ConjugateByFlow(const PElement& p,
                                const Eigen::Vector4d& exponents, double t);

inline constexpr double kPElementTol = 1e-9;
inline constexpr double kFactorizationSingularTol = 1e-12;

/// u_s p = p(s)^{-1} u(u_tilde) with u_s = I + s E34.
struct Factorization {
  PElement p_of_s;
  Eigen::Vector3d u_tilde;
  /// max-norm of u_s p - p(s)^{-1} u(u_tilde).
  double residual = 0.0;
};

Factorization SolveFactorization(const PElement& p, double s);

/// q(s) = q(p(s)) = diag(N(s)^{-1}, det N(s)), N(s) the top-left block of u_s p.
Eigen::Matrix4d QOfS(const PElement& p, double s);

inline constexpr double kMaxHalfWidth = 0.5;
inline constexpr double kDenominatorFloor = 1e-3;

/// u_tilde(s) = tau(s) w with tau(s) = s / (1 + c s), tau'(0) = 1.
struct SegmentParameters {
  Eigen::Vector3d w;
  double c = 0.0;
  /// The interval is [-s_star, s_star].
  double s_star = kMaxHalfWidth;

  double Tau(double s) const { return s / (1.0 + c * s); }
  /// Coefficients in increasing degree.
  std::vector<double> tau_numerator() const { return {0.0, 1.0}; }
  std::vector<double> tau_denominator() const { return {1.0, c}; }
};

SegmentParameters ComputeSegmentParameters(const PElement& p);

/// Which conjugation realizes Ad(q(0)) h in the membership test.
enum class AdConvention {
  /// Conjugation by q(p) = diag(B, p44): reproduces the displayed pattern
  /// (-a-b+e entries) and the relation x + y + 2z = 0.
  kDisplayed,
  /// Conjugation by q(0) = diag(B^{-1}, det B).
  kTangent,
};

inline constexpr double kRankThreshold = 1e-8;
inline constexpr double kFiniteDifferenceStep = 1e-5;
/// Required agreement of the finite-difference and closed-form derivative.
inline constexpr double kClosedFormTol = 1e-6;

/// q'(0) q(0)^{-1} by central differences.
Eigen::Matrix4d LogDerivativeFiniteDifference(
    const PElement& p, double h = kFiniteDifferenceStep);
/// diag(-(B^{-1} e3) x^T, x^T B^{-1} e3) with x the bottom row of p.
Eigen::Matrix4d LogDerivativeClosedForm(const PElement& p);

/// Basis of the block-diagonal 2+2 trace-zero algebra: E12, E21, E34, E43,
/// E11-E44, E22-E44, E33-E44.
std::vector<Eigen::Matrix4d> HBasis();

/// E_{sigma(a) sigma(b)} for a < b (0-based sigma).
std::vector<Eigen::Matrix4d> UPlusBasis(const Permutation& sigma);

/// The conjugated h basis for p under the given convention.
std::vector<Eigen::Matrix4d> AdjointHBasis(const PElement& p,
                                           AdConvention convention);

struct MembershipResult {
  /// True iff q'(0) q(0)^{-1} lies outside u+_sigma + Ad(.)h.
  bool outside = false;
  int span_rank = 0;
  /// Relative distance of the derivative from the span.
  double residual = 0.0;
};

/// The closed-form derivative is tested after it agrees with the
/// finite-difference one to kClosedFormTol. Throws RankTestUnstable on
/// disagreement or when a relative singular value lies within a factor 10 of
/// kRankThreshold.
MembershipResult RelationMembershipTest(
    const PElement& p, const Permutation& sigma,
    AdConvention convention = AdConvention::kDisplayed);

/// True iff the test returns outside for all 24 permutations.
bool IsAdmissible(const PElement& p,
                  AdConvention convention = AdConvention::kDisplayed);

/// First (x, y, z) in [-3, 3]^3, in seeded order, whose example element
/// passes for every permutation. Throws SearchExhausted.
std::array<int, 3> FindAdmissibleXyz(std::uint64_t seed);

/// Minkowski embedding of the integers of Q(sqrt2, sqrt3) with integral
/// basis {1, sqrt2, sqrt3, (sqrt2 + sqrt6)/2}, embeddings ordered
/// (+,+), (+,-), (-,+), (-,-); scaled to determinant 1.
Lattice QuarticBaseLattice();

/// min systole of diag(e^{t d1}, e^{t d2}, e^{t d3}, e^{-t(d1+d2+d3)}) x
/// over directions d in {-1,0,1}^3 \ {0} (normalized) and t in [0, t_max].
double DiagonalOrbitMinSystole(const Lattice& x, double t_max = 10.0,
                               double t_step = 0.25);

struct SegmentConstruction {
  PElement p = PElement::Example(0, 0, 0);
  /// Target example element the base point approximates.
  std::array<int, 3> xyz{};
  /// Rational right factor: base point = g0 gamma Z^4.
  Eigen::Matrix4d gamma;
  std::int64_t gamma_denominator = 1;
  Lattice base_point = StandardLattice(4);
  Eigen::Vector3d v0;
  SegmentParameters params;
  bool admissible = false;

  /// v0 + tau(s) w.
  Eigen::Vector3d LinePoint(double s) const;
};

inline constexpr std::int64_t kDefaultGammaDenominator = 16;

inline Eigen::Vector3d DefaultAnchorTarget() { return {0.3, 0.6, 0.2}; }

/// g = g0 gamma with g0 the quartic lattice and gamma in SL_4(Q) the
/// denominator-D rounding of g0^{-1} p_example u(v_target); then g = p u(v0).
SegmentConstruction BuildSegmentConstruction(
    const std::array<int, 3>& xyz,
    const Eigen::Vector3d& v_target = DefaultAnchorTarget(),
    std::int64_t denominator = kDefaultGammaDenominator);

nlohmann::json ToJson(const SegmentConstruction& construction);

struct SegmentVerdict {
  double s = 0.0;
  double min_systole = 0.0;
  double max_systole = 0.0;
  /// max over [T/2, T].
  double max_tail_systole = 0.0;
  bool improvement_evidence = false;
};

inline constexpr double kSegmentK1Margin = 0.02;

/// f_t u(l(s)) Z^4 under diag(e^{t/3}, e^{t/3}, e^{t/3}, e^{-t}).
std::vector<SegmentVerdict> VerifySegment(const SegmentConstruction& c,
                                          const std::vector<double>& s_grid,
                                          double T, int threads = 0);

/// Header `s,min_systole,max_tail_systole,verdict`.
void WriteVerdictCsv(std::ostream& out,
                     const std::vector<SegmentVerdict>& verdicts);

}  // namespace dirlab
