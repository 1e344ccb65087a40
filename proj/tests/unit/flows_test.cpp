#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "dirlab/flows.hpp"
#include "dirlab/random_lattices.hpp"
#include "dirlab/svp.hpp"

namespace dirlab {
namespace {

constexpr double kZeta = 1.3247179572447460;

TEST(WeightVector, Validation) {
  EXPECT_NO_THROW(WeightVector::Make(2.0 / 3, 1.0 / 3));
  EXPECT_THROW(WeightVector::Make(0.6, 0.6), Error);
  EXPECT_THROW(WeightVector::Make(1.0, 0.0), Error);
}

TEST(FlowMatrix, HandValues) {
  const Eigen::Matrix3d a = FlowMatrix({2.0 / 3, 1.0 / 3}, 3 * std::log(2.0));
  EXPECT_TRUE(a.isApprox(Eigen::Vector3d(4, 2, 0.125).asDiagonal().toDenseMatrix()));
  const Eigen::Matrix3d b = FlowMatrix({0.5, 0.5}, 2 * std::log(2.0));
  EXPECT_TRUE(b.isApprox(Eigen::Vector3d(2, 2, 0.25).asDiagonal().toDenseMatrix()));
  EXPECT_NEAR(a.determinant(), 1.0, 1e-12);
}

TEST(UMatrix, ColumnAndGroupLaw) {
  const Eigen::Matrix3d u = UMatrix(Eigen::Vector2d(1, 2));
  EXPECT_TRUE(u.col(2).isApprox(Eigen::Vector3d(1, 2, 1)));
  EXPECT_EQ(u(0, 1), 0.0);
  const Eigen::Vector2d v(0.3, -1.7), w(2.5, 0.25);
  EXPECT_TRUE((UMatrix(v) * UMatrix(w)).isApprox(UMatrix(Eigen::Vector2d(v + w))));
}

TEST(UMatrix, ConjugationIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int k = 0; k < 200; ++k) {
    const double r1 = 0.05 + 0.9 * unit(rng);
    const WeightVector r{r1, 1 - r1};
    const Eigen::Vector2d v(unit(rng), unit(rng));
    const double t = 10 * unit(rng);
    const Eigen::Vector2d moved(std::exp((r.r1 + 1) * t) * v(0),
                                std::exp((r.r2 + 1) * t) * v(1));
    EXPECT_TRUE((FlowMatrix(r, t) * UMatrix(v))
                    .isApprox(UMatrix(moved) * FlowMatrix(r, t), 1e-9));
  }
}

TEST(LinePoint, ZetaLine) {
  const LineSpec line = LineSpec::Make(1, kZeta * kZeta - kZeta, 0, 2);
  const Eigen::Vector2d p = LinePoint(line, kZeta);
  EXPECT_NEAR(p(0), kZeta, 1e-15);
  EXPECT_NEAR(p(1), kZeta * kZeta, 1e-14);
  EXPECT_THROW(LineSpec::Make(1, 0, 1, 1), Error);
}

TEST(Evolve, DiagonalHandValue) {
  const Lattice l = Evolve(StandardLattice(3), WeightVector{0.5, 0.5},
                           2 * std::log(2.0));
  EXPECT_NEAR(Systole(l), 0.25, 1e-12);
}

TEST(Evolve, SemigroupProperty) {
  std::mt19937_64 rng(4);
  const WeightVector r{2.0 / 3, 1.0 / 3};
  for (int k = 0; k < 10; ++k) {
    const Lattice x = RandomTestLattice(3, rng);
    const double t1 = 1.0 + k, t2 = 9.5 - 0.5 * k;
    const double split = Systole(Evolve(Evolve(x, r, t1), r, t2));
    EXPECT_NEAR(split, Systole(Evolve(x, r, t1 + t2)), 1e-6);
  }
}

TEST(TrajectoryConfig, Validation) {
  EXPECT_THROW((TrajectoryConfig{1.0, 10, 2.0}.Validate()), Error);
  EXPECT_THROW((TrajectoryConfig{-1.0, 10, 0.5}.Validate()), Error);
  const auto cfg = TrajectoryConfig::WithDefaultSampling(30);
  EXPECT_LE(cfg.t_max / cfg.t_samples, 0.1 + 1e-12);
}

TEST(SystoleSeries, OriginDecaysAsExp) {
  const SystoleSeries s = ComputeSystoleSeries(
      Eigen::Vector2d(0, 0), WeightVector{0.5, 0.5}, {5.0, 100, 0.5});
  ASSERT_EQ(s.size(), 101u);
  EXPECT_DOUBLE_EQ(s.systole.front(), 1.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_NEAR(s.systole[k], std::exp(-s.t[k]), 1e-12);
    EXPECT_NEAR(s.log_systole[k], -s.t[k], 1e-9);
  }
}

TEST(SystoleSeries, RationalPointDiverges) {
  const SystoleSeries s = ComputeSystoleSeries(
      Eigen::Vector2d(0.5, 0.5), WeightVector{0.5, 0.5},
      TrajectoryConfig::WithDefaultSampling(20));
  EXPECT_LT(s.systole.back(), 1e-6);
  EXPECT_LT(s.TailMax(), 1e-5);
}

TEST(SystoleSeries, ZetaStaysBounded) {
  const SystoleSeries s = ComputeSystoleSeries(
      Eigen::Vector2d(kZeta, kZeta * kZeta), WeightVector{0.5, 0.5},
      TrajectoryConfig::WithDefaultSampling(30));
  EXPECT_GT(s.Min(), 0.01);
  EXPECT_NEAR(s.Min(), 0.20773, 5e-5);
  for (double v : s.systole) EXPECT_LE(v, 1.0 + 1e-9);
}

TEST(SystoleSeries, CsvHeader) {
  std::ostringstream out;
  WriteSystoleSeriesCsv(out, ComputeSystoleSeries(Eigen::Vector2d(0, 0),
                                                  WeightVector{0.5, 0.5},
                                                  {1.0, 2, 0.5}));
  EXPECT_EQ(out.str().substr(0, 22), "t,systole,log_systole\n");
}

}  // namespace
}  // namespace dirlab
